#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htpg/random.hpp"

namespace htpg {

// Symmetric alpha-stable law S(alpha, 0, scale, location) in the standard
// parameterization. Under this convention the alpha = 2 member is Gaussian
// with variance 2 * scale^2 and the alpha = 1 member is Cauchy with
// half-width `scale`.
struct StableSpec {
  double alpha = 1.0;
  double location = 0.0;
  double scale = 1.0;

  // Throws ParameterError unless 0 < alpha <= 2 and scale > 0 (finite).
  void validate() const;
  bool has_closed_form() const { return alpha == 1.0 || alpha == 2.0; }
};

// One draw. Cauchy and Gaussian members use closed-form transforms; every
// other alpha goes through Chambers-Mallows-Stuck. A single uniform is
// consumed for alpha = 1, two otherwise.
double sample_sas(const StableSpec& spec, Stream& rng);

// Chambers-Mallows-Stuck for any alpha in (0, 2], standardized (location 0,
// scale 1). Exposed so the closed-form samplers can be cross-checked.
double cms_standard(double alpha, Stream& rng);

// Inverse CDF of the standard Cauchy law.
double cauchy_quantile(double u);

// Closed-form members only (alpha in {1, 2}); others throw
// UnsupportedMemberError.
double log_density(const StableSpec& spec, double x);
double cdf(const StableSpec& spec, double x);

// P(|X - location| > threshold * scale) for threshold > 0.
double tail_probability(const StableSpec& spec, double threshold);

// Kolmogorov-Smirnov statistic of `samples` (sorted in place) against the
// closed-form CDF of `spec`.
double ks_statistic(std::vector<double>& samples, const StableSpec& spec);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Statistical self-test suite for the samplers and closed forms; backs the
// `dist-tests` subcommand.
std::vector<CheckResult> run_distribution_checks(std::uint64_t seed);

}  // namespace htpg
