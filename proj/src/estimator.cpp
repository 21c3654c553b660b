#include "htpg/estimator.hpp"

#include <cmath>
#include <limits>

#include "htpg/error.hpp"

namespace htpg {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ParameterError("gamma must lie in (0, 1)");
  }
}

}  // namespace

std::int64_t draw_horizon(double gamma, Stream& rng) {
  check_gamma(gamma);
  // Inversion: T = floor(log U / log q) has P(T >= t) = q^t.
  const double log_q = 0.5 * std::log(gamma);
  const double u = 1.0 - rng.uniform();  // (0, 1]
  const double t = std::floor(std::log(u) / log_q);
  constexpr double cap = static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2);
  return t >= cap ? static_cast<std::int64_t>(cap) : static_cast<std::int64_t>(t);
}

QEstimate estimate_q(const Environment& env, const ActionFn& act,
                     const EnvState& s0, double a0, double gamma,
                     Stream& rng) {
  QEstimate q;
  q.horizon_drawn = draw_horizon(gamma, rng);
  const double root = std::sqrt(gamma);

  EnvState st = s0;
  st.step_count = 0;
  double weight = 1.0;
  double action = env.clamp_action(a0);
  for (std::int64_t t = 0;; ++t) {
    const StepResult r = env.step(st, action);
    q.value += weight * r.reward;
    if (r.done || t >= q.horizon_drawn) break;
    st = r.next_state;
    weight *= root;
    action = env.clamp_action(act(env.features(st), rng));
  }
  return q;
}

QEstimate estimate_q(const Environment& env, const PolicyParams& p,
                     const EnvState& s0, double a0, double gamma,
                     Stream& rng) {
  p.validate();
  return estimate_q(env, policy_actions(p), s0, a0, gamma, rng);
}

double discounted_prefix(const Trajectory& traj, double gamma,
                         std::int64_t horizon) {
  check_gamma(gamma);
  const double root = std::sqrt(gamma);
  double weight = 1.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    if (static_cast<std::int64_t>(t) > horizon) break;
    sum += weight * traj.steps[t].reward;
    weight *= root;
  }
  return sum;
}

double q_estimate_bound(double reward_bound, double gamma) {
  check_gamma(gamma);
  return reward_bound / (1.0 - std::sqrt(gamma));
}

}  // namespace htpg
