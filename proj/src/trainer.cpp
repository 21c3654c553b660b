#include "htpg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "htpg/error.hpp"
#include "htpg/estimator.hpp"

namespace htpg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

void validate_step_rule(const StepRule& rule) {
  std::visit(overloaded{
                 [](const PowerDecay& r) {
                   if (!(r.b > 0.0 && r.b < 1.0)) {
                     throw ParameterError("b must lie in (0, 1)");
                   }
                 },
                 [](const LinearRange& r) {
                   if (!(r.end > 0.0 && r.start >= r.end)) {
                     throw ParameterError(
                         "step range needs alpha_start >= alpha_end > 0");
                   }
                   if (r.count < 1) {
                     throw ParameterError("step range count must be positive");
                   }
                 },
                 [](const ConstantStep& r) {
                   if (!(r.alpha > 0.0)) {
                     throw ParameterError("constant step must be positive");
                   }
                 },
             },
             rule);
}

double step_size(const StepRule& rule, std::int64_t k) {
  if (k < 1) throw ParameterError("step index k must be >= 1");
  return std::visit(
      overloaded{
          [k](const PowerDecay& r) {
            return std::pow(static_cast<double>(k), -r.b);
          },
          [k](const LinearRange& r) {
            if (k >= r.count) return r.end;
            if (k == 1) return r.start;
            const double frac = static_cast<double>(k - 1) /
                                static_cast<double>(r.count - 1);
            return r.start * std::pow(r.end / r.start, frac);
          },
          [](const ConstantStep& r) { return r.alpha; },
      },
      rule);
}

double max_step_size(const StepRule& rule) { return step_size(rule, 1); }

void validate_schedule(const StepRule& step, const UpdateRule& update) {
  validate_step_rule(step);
  if (const auto* l = std::get_if<LipschitzAware>(&update)) {
    if (!(l->l1j >= 0.0)) throw ParameterError("L1(J) must be non-negative");
    // Every schedule here is non-increasing, so k = 1 is the worst case.
    if (!(1.0 / max_step_size(step) > l->l1j)) {
      std::ostringstream os;
      os << "Lipschitz-aware update needs 1/alpha_k > L1(J) = " << l->l1j
         << "; violated at k = 1 (alpha = " << max_step_size(step) << ")";
      throw ScheduleError(os.str(), 1);
    }
  }
}

std::vector<double> apply_update(std::span<const double> theta,
                                 std::span<const double> grad,
                                 const UpdateRule& rule, double alpha_k,
                                 std::int64_t k) {
  if (theta.size() != grad.size()) {
    throw ParameterError("theta and gradient lengths differ");
  }
  if (!(alpha_k > 0.0)) throw ParameterError("step size must be positive");
  double eff = alpha_k;
  if (const auto* l = std::get_if<LipschitzAware>(&rule)) {
    const double denom = 1.0 / alpha_k - l->l1j;
    if (!(denom > 0.0)) {
      std::ostringstream os;
      os << "1/alpha_k - L1(J) = " << denom << " <= 0 at k = " << k;
      throw ScheduleError(os.str(), k);
    }
    eff = l->l1j == 0.0 ? alpha_k : 1.0 / denom;
  }
  std::vector<double> out(theta.begin(), theta.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += eff * grad[i];
  return out;
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  if (!(epsilon_clip > 0.0 && epsilon_clip < 1.0)) {
    throw ParameterError("epsilon_clip must lie in (0, 1)");
  }
  if (episodes < 0) throw ParameterError("episodes must be non-negative");
  validate_schedule(step_rule, update_rule);
  policy_init.validate();
}

TrainOutcome run_training(const TrainConfig& config, const Environment& env) {
  config.validate();
  TrainOutcome out{{}, config.policy_init};
  RunMetrics& m = out.metrics;
  PolicyParams& policy = out.policy;
  if (policy.theta_x0.size() != env.features(EnvState{}).size()) {
    throw ParameterError("policy theta_x0 does not match the feature dimension");
  }

  Stream rng(config.seed);
  const auto act = policy_actions(policy);
  const bool by_episode = std::holds_alternative<LinearRange>(config.step_rule);
  std::int64_t k = 1;

  for (std::int64_t ep = 1; ep <= config.episodes; ++ep) {
    const Trajectory traj = rollout(env, policy, rng, env.spec().max_steps);

    double shared_q = 0.0;
    if (config.q_mode == QMode::Shared) {
      shared_q = discounted_prefix(traj, config.gamma,
                                   draw_horizon(config.gamma, rng));
    }

    const PolicyParams behaviour = policy;
    std::vector<double> theta = policy.flat();
    const std::vector<double> theta_start = theta;
    for (const Transition& tr : traj.steps) {
      const double q =
          config.q_mode == QMode::Shared
              ? shared_q
              : estimate_q(env, act, tr.state, tr.applied, config.gamma, rng)
                    .value;
      std::vector<double> g =
          clip_score(score(behaviour, tr.features, tr.action), config.epsilon_clip,
                     config.clip_mode);
      for (double& x : g) x *= q;
      const double alpha = step_size(config.step_rule, by_episode ? ep : k);
      theta = apply_update(theta, g, config.update_rule, alpha, k);
      if (all_finite(theta)) policy.assign(theta);
      const double sigma = policy_scale(policy);
      if (!all_finite(theta) || !(sigma > 0.0) || !std::isfinite(sigma)) {
        std::ostringstream os;
        os << "non-finite policy parameters at episode " << ep << ", update "
           << k << " (Q estimate " << q << ", scale " << sigma << ")";
        m.divergence = os.str();
        m.diverged_episode = ep;
        m.wall_updates = k - 1;
        return out;
      }
      ++k;
    }

    const double ret = traj.total_return();
    m.returns.push_back(ret);
    const auto window = std::min<std::size_t>(m.returns.size(), 100);
    double window_sum = 0.0;
    for (auto it = m.returns.end() - static_cast<std::ptrdiff_t>(window);
         it != m.returns.end(); ++it) {
      window_sum += *it;
    }
    m.moving_avg_100.push_back(window_sum / static_cast<double>(window));

    double norm2 = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      norm2 += (theta[i] - theta_start[i]) * (theta[i] - theta_start[i]);
    }
    m.update_norms.push_back(std::sqrt(norm2));
    m.update_counts.push_back(k - 1);
    m.reached_goal.push_back(traj.terminal);

    if (!m.first_exit_episode) {
      bool left = env.exited(traj.final_state);
      for (const auto& tr : traj.steps) left = left || env.exited(tr.state);
      if (left) m.first_exit_episode = ep;
    }
  }
  m.wall_updates = k - 1;
  return out;
}

RunMetrics train(const TrainConfig& config, const Environment& env) {
  TrainOutcome out = run_training(config, env);
  if (out.metrics.divergence) {
    throw DivergenceError(*out.metrics.divergence,
                          *out.metrics.diverged_episode,
                          out.metrics.wall_updates + 1);
  }
  return std::move(out.metrics);
}

}  // namespace htpg
