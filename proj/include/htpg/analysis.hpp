#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "htpg/env.hpp"
#include "htpg/policy.hpp"
#include "htpg/random.hpp"
#include "htpg/trainer.hpp"

namespace htpg {

// Gradient noise w_k with E[w] = 0 and E||w||^2 = y1 + y2 ||grad J||^2.
struct NoiseModel {
  double y1 = 0.0;
  double y2 = 0.0;

  void validate() const;
  // Isotropic Gaussian draw meeting the second-moment law with equality.
  std::vector<double> sample(std::span<const double> grad, Stream& rng) const;
};

// Constants of the averaged-gradient-norm bound.
struct BoundParams {
  double u_r = 1.0;
  double gamma = 0.5;
  double l1j = 2.0;
  double y1 = 1.0;
  double b = 0.5;

  void validate() const;
};

// (2 U_R / (1 - gamma)) N^{b-1} + L Y1 + (L Y1 b / (N (1 - b))) (N^{1-b} - 1)
double bound_rhs(const BoundParams& p, std::int64_t n);

// Smooth bounded objective with an exact gradient and a certified Lipschitz
// constant for that gradient.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(std::span<const double> theta) const = 0;
  virtual std::vector<double> gradient(std::span<const double> theta) const = 0;
  virtual double gradient_lipschitz() const = 0;
  // sup |J|
  virtual double value_bound() const = 0;
};

// J(theta) = -(1 - exp(-||theta||^2)). Maximized at theta = 0; the Hessian
// (4 theta theta^T - 2 I) exp(-||theta||^2) has spectral norm at most 2,
// attained at the origin.
class BumpObjective final : public Objective {
 public:
  double value(std::span<const double> theta) const override;
  std::vector<double> gradient(std::span<const double> theta) const override;
  double gradient_lipschitz() const override { return 2.0; }
  double value_bound() const override { return 1.0; }
};

// Noisy gradient ascent theta_{k+1} = update(theta_k, grad J + w_k) for n
// steps; returns ||grad J(theta_k)||^2 for k = 1..n (before each update).
std::vector<double> synthetic_sga_run(const Objective& objective,
                                      const NoiseModel& noise,
                                      const StepRule& step,
                                      const UpdateRule& update,
                                      std::span<const double> theta0,
                                      std::int64_t n, Stream& rng);

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  std::int64_t seeds = 1;
  // Standard error of the seed average; 0 for a single sequence.
  double lhs_stderr = 0.0;
};

BoundReport check_bound(std::span<const double> grad_norm_sq,
                        const BoundParams& p);
// Seed-averaged version: lhs is the mean over seeds of per-seed averages.
BoundReport check_bound(const std::vector<std::vector<double>>& runs,
                        const BoundParams& p);

// Full testbed sweep used by the CLI and the acceptance suite.
struct BoundExperiment {
  BoundParams params;
  double y2 = 0.0;
  std::int64_t n = 10000;
  std::int64_t seeds = 20;
  std::uint64_t base_seed = 1;
  std::vector<double> theta0{0.5, 0.5};
  bool lipschitz_update = false;
};

BoundReport run_bound_experiment(const BoundExperiment& exp);

constexpr double kNeverExited = std::numeric_limits<double>::infinity();

struct FamilyRuns {
  std::string name;
  std::vector<RunMetrics> runs;  // one per seed, same seed order per family
};

struct FamilyExit {
  std::string name;
  double median_exit = kNeverExited;
};

struct FirstExitSummary {
  std::vector<FamilyExit> families;
  // One-sided exact sign test that the first family exits earlier than the
  // second, pairing runs by index and dropping ties.
  double sign_test_p = 1.0;
  int wins = 0;
  int losses = 0;
  int ties = 0;
};

// Runs that never exit count as +infinity.
FirstExitSummary first_exit_statistics(const std::vector<FamilyRuns>& families);

double median(std::vector<double> xs);
// P(Binomial(n, 1/2) >= wins)
double sign_test_p_value(int wins, int losses);

// Fraction of sampled (pre-clamp) actions farther than threshold_sigmas * sigma
// from the mode at their state.
double tail_exploration_ratio(const Trajectory& traj, const PolicyParams& p,
                              double threshold_sigmas);

}  // namespace htpg
