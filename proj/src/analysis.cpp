#include "htpg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "htpg/error.hpp"

namespace htpg {

void NoiseModel::validate() const {
  if (!(y1 >= 0.0) || !(y2 >= 0.0)) {
    throw ParameterError("noise constants must be non-negative");
  }
}

std::vector<double> NoiseModel::sample(std::span<const double> grad,
                                       Stream& rng) const {
  double g2 = 0.0;
  for (double g : grad) g2 += g * g;
  const double total = y1 + y2 * g2;
  const double sd = std::sqrt(total / static_cast<double>(grad.size()));
  std::vector<double> w(grad.size());
  for (double& x : w) x = sd * rng.normal();
  return w;
}

void BoundParams::validate() const {
  if (!(u_r > 0.0 && l1j > 0.0 && y1 > 0.0)) {
    throw ParameterError("bound constants must be positive");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  if (!(b > 0.0 && b < 1.0)) throw ParameterError("b must lie in (0, 1)");
}

double bound_rhs(const BoundParams& p, std::int64_t n) {
  if (n < 1) throw ParameterError("N must be >= 1");
  const double nn = static_cast<double>(n);
  const double ly = p.l1j * p.y1;
  return (2.0 * p.u_r / (1.0 - p.gamma)) * std::pow(nn, p.b - 1.0) + ly +
         (ly * p.b / (nn * (1.0 - p.b))) * (std::pow(nn, 1.0 - p.b) - 1.0);
}

double BumpObjective::value(std::span<const double> theta) const {
  double r2 = 0.0;
  for (double t : theta) r2 += t * t;
  return -(1.0 - std::exp(-r2));
}

std::vector<double> BumpObjective::gradient(
    std::span<const double> theta) const {
  double r2 = 0.0;
  for (double t : theta) r2 += t * t;
  const double e = std::exp(-r2);
  std::vector<double> g(theta.begin(), theta.end());
  for (double& x : g) x *= -2.0 * e;
  return g;
}

std::vector<double> synthetic_sga_run(const Objective& objective,
                                      const NoiseModel& noise,
                                      const StepRule& step,
                                      const UpdateRule& update,
                                      std::span<const double> theta0,
                                      std::int64_t n, Stream& rng) {
  noise.validate();
  validate_schedule(step, update);
  if (theta0.empty()) throw ParameterError("theta0 is empty");
  if (n < 0) throw ParameterError("n must be non-negative");
  std::vector<double> theta(theta0.begin(), theta0.end());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 1; k <= n; ++k) {
    std::vector<double> g = objective.gradient(theta);
    out.push_back(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
    if (noise.y1 > 0.0 || noise.y2 > 0.0) {
      const std::vector<double> w = noise.sample(g, rng);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += w[i];
    }
    theta = apply_update(theta, g, update, step_size(step, k), k);
    for (double t : theta) {
      if (!std::isfinite(t)) {
        std::ostringstream os;
        os << "synthetic ascent diverged at k = " << k;
        throw DivergenceError(os.str(), 0, k);
      }
    }
  }
  return out;
}

BoundReport check_bound(std::span<const double> grad_norm_sq,
                        const BoundParams& p) {
  if (grad_norm_sq.empty()) throw ParameterError("empty gradient-norm sequence");
  BoundReport r;
  r.lhs = std::accumulate(grad_norm_sq.begin(), grad_norm_sq.end(), 0.0) /
          static_cast<double>(grad_norm_sq.size());
  r.rhs = bound_rhs(p, static_cast<std::int64_t>(grad_norm_sq.size()));
  r.holds = r.lhs <= r.rhs;
  return r;
}

BoundReport check_bound(const std::vector<std::vector<double>>& runs,
                        const BoundParams& p) {
  if (runs.empty()) throw ParameterError("no runs to average");
  const std::size_t n = runs.front().size();
  std::vector<double> means;
  for (const auto& run : runs) {
    if (run.size() != n) throw ParameterError("runs differ in length");
    means.push_back(check_bound(run, p).lhs);
  }
  BoundReport r;
  r.seeds = static_cast<std::int64_t>(runs.size());
  const double s = static_cast<double>(runs.size());
  r.lhs = std::accumulate(means.begin(), means.end(), 0.0) / s;
  if (runs.size() > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - r.lhs) * (m - r.lhs);
    r.lhs_stderr = std::sqrt(ss / (s - 1.0) / s);
  }
  r.rhs = bound_rhs(p, static_cast<std::int64_t>(n));
  r.holds = r.lhs <= r.rhs;
  return r;
}

BoundReport run_bound_experiment(const BoundExperiment& exp) {
  exp.params.validate();
  if (exp.seeds < 1) throw ParameterError("need at least one seed");
  const BumpObjective objective;
  const NoiseModel noise{exp.params.y1, exp.y2};
  const StepRule step = PowerDecay{exp.params.b};
  const UpdateRule update = exp.lipschitz_update
                                ? UpdateRule{LipschitzAware{exp.params.l1j}}
                                : UpdateRule{PlainAscent{}};
  std::vector<std::vector<double>> runs;
  const Stream root(exp.base_seed);
  for (std::int64_t s = 0; s < exp.seeds; ++s) {
    Stream rng = root.split(static_cast<std::uint64_t>(s));
    runs.push_back(synthetic_sga_run(objective, noise, step, update,
                                     exp.theta0, exp.n, rng));
  }
  return check_bound(runs, exp.params);
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw ParameterError("median of an empty set");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  const double a = xs[n / 2 - 1];
  const double b = xs[n / 2];
  if (std::isinf(b)) return b;
  return 0.5 * (a + b);
}

double sign_test_p_value(int wins, int losses) {
  if (wins < 0 || losses < 0) throw ParameterError("negative counts");
  const int n = wins + losses;
  if (n == 0) return 1.0;
  // Sum C(n, i) / 2^n for i >= wins in log space.
  double p = 0.0;
  for (int i = wins; i <= n; ++i) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                  std::lgamma(n - i + 1.0) - n * std::log(2.0));
  }
  return std::min(1.0, p);
}

FirstExitSummary first_exit_statistics(
    const std::vector<FamilyRuns>& families) {
  if (families.size() < 2) {
    throw ParameterError("first-exit statistics need at least two families");
  }
  const std::size_t seeds = families.front().runs.size();
  if (seeds < 5) throw ParameterError("first-exit statistics need >= 5 seeds");
  for (const auto& f : families) {
    if (f.runs.size() != seeds) {
      throw ParameterError("families must have the same number of seeds");
    }
  }

  auto exit_of = [](const RunMetrics& m) {
    return m.first_exit_episode ? static_cast<double>(*m.first_exit_episode)
                                : kNeverExited;
  };

  FirstExitSummary out;
  for (const auto& f : families) {
    std::vector<double> xs;
    for (const auto& m : f.runs) xs.push_back(exit_of(m));
    out.families.push_back({f.name, median(std::move(xs))});
  }
  for (std::size_t i = 0; i < seeds; ++i) {
    const double a = exit_of(families[0].runs[i]);
    const double b = exit_of(families[1].runs[i]);
    if (a < b) {
      ++out.wins;
    } else if (b < a) {
      ++out.losses;
    } else {
      ++out.ties;
    }
  }
  out.sign_test_p = sign_test_p_value(out.wins, out.losses);
  return out;
}

double tail_exploration_ratio(const Trajectory& traj, const PolicyParams& p,
                              double threshold_sigmas) {
  if (traj.steps.empty()) throw ParameterError("empty trajectory");
  p.validate();
  const double sigma = policy_scale(p);
  std::size_t hits = 0;
  for (const auto& tr : traj.steps) {
    if (std::abs(tr.action - policy_mode(p, tr.features)) >
        threshold_sigmas * sigma) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(traj.steps.size());
}

}  // namespace htpg
