#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "htpg/random.hpp"
#include "htpg/stable.hpp"

namespace htpg {

// Affine state features: raw coordinates followed by a constant 1.
class FeatureVector {
 public:
  FeatureVector() = default;
  // Takes the full vector; throws ParameterError unless entries are finite
  // and the last one is exactly 1.
  explicit FeatureVector(std::vector<double> values);
  static FeatureVector affine(std::span<const double> raw);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

struct FixedScale {
  double sigma0 = 1.0;
};
struct AdaptiveScale {};
using ScaleMode = std::variant<FixedScale, AdaptiveScale>;

// Policy parameters theta = [theta_x0; theta_sigma]. The action law has mode
// theta_x0 . s and scale sigma = exp(sum(theta_sigma)) (adaptive) or sigma0
// (fixed). For the Gaussian member sigma is the standard deviation.
struct PolicyParams {
  std::vector<double> theta_x0;
  std::vector<double> theta_sigma{0.0};
  int alpha = 1;
  ScaleMode scale_mode = AdaptiveScale{};

  void validate() const;
  bool adaptive() const {
    return std::holds_alternative<AdaptiveScale>(scale_mode);
  }
  std::size_t size() const { return theta_x0.size() + theta_sigma.size(); }
  std::vector<double> flat() const;
  void assign(std::span<const double> flat);
};

double policy_mode(const PolicyParams& p, const FeatureVector& s);
double policy_scale(const PolicyParams& p);

// Action law in stable-law coordinates. The Gaussian standard deviation
// sigma maps to stable scale sigma / sqrt(2).
StableSpec action_distribution(const PolicyParams& p, const FeatureVector& s);

double sample_action(const PolicyParams& p, const FeatureVector& s,
                     Stream& rng);

double log_likelihood(const PolicyParams& p, const FeatureVector& s, double a);

// Gradient of log_likelihood w.r.t. [theta_x0; theta_sigma]. The
// theta_sigma block is zero under a fixed scale.
std::vector<double> score(const PolicyParams& p, const FeatureVector& s,
                          double a);

enum class ClipMode {
  // min(g, clamp(g, 1 - eps, 1 + eps)) per component, i.e. min(g, 1 + eps).
  Literal,
  // clamp(g, -(1 + eps), 1 + eps) per component.
  Symmetric,
};

std::vector<double> clip_score(std::span<const double> g, double epsilon,
                               ClipMode mode = ClipMode::Literal);

}  // namespace htpg
