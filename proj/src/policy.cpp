#include "htpg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "htpg/error.hpp"

namespace htpg {

FeatureVector::FeatureVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty() || values_.back() != 1.0) {
    throw ParameterError("feature vector must end with the constant 1");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ParameterError("non-finite feature");
  }
}

FeatureVector FeatureVector::affine(std::span<const double> raw) {
  std::vector<double> v(raw.begin(), raw.end());
  v.push_back(1.0);
  return FeatureVector(std::move(v));
}

void PolicyParams::validate() const {
  if (alpha != 1 && alpha != 2) {
    throw ParameterError("trainable policies need alpha in {1, 2}");
  }
  if (theta_x0.empty()) throw ParameterError("theta_x0 is empty");
  if (adaptive() && theta_sigma.empty()) {
    throw ParameterError("adaptive scale needs at least one theta_sigma weight");
  }
  if (const auto* f = std::get_if<FixedScale>(&scale_mode)) {
    if (!(f->sigma0 > 0.0) || !std::isfinite(f->sigma0)) {
      throw ParameterError("fixed sigma0 must be positive");
    }
  }
}

std::vector<double> PolicyParams::flat() const {
  std::vector<double> out(theta_x0);
  out.insert(out.end(), theta_sigma.begin(), theta_sigma.end());
  return out;
}

void PolicyParams::assign(std::span<const double> flat) {
  if (flat.size() != size()) {
    throw ParameterError("flat parameter vector has the wrong length");
  }
  std::copy_n(flat.begin(), theta_x0.size(), theta_x0.begin());
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(theta_x0.size()),
            flat.end(), theta_sigma.begin());
}

namespace {

void check_dims(const PolicyParams& p, const FeatureVector& s) {
  if (s.size() != p.theta_x0.size()) {
    std::ostringstream os;
    os << "feature dimension " << s.size() << " does not match theta_x0 ("
       << p.theta_x0.size() << ")";
    throw ParameterError(os.str());
  }
}

}  // namespace

double policy_mode(const PolicyParams& p, const FeatureVector& s) {
  check_dims(p, s);
  const auto v = s.values();
  return std::inner_product(v.begin(), v.end(), p.theta_x0.begin(), 0.0);
}

double policy_scale(const PolicyParams& p) {
  if (const auto* f = std::get_if<FixedScale>(&p.scale_mode)) {
    return f->sigma0;
  }
  return std::exp(std::accumulate(p.theta_sigma.begin(), p.theta_sigma.end(),
                                  0.0));
}

StableSpec action_distribution(const PolicyParams& p, const FeatureVector& s) {
  p.validate();
  const double sigma = policy_scale(p);
  const double scale = p.alpha == 2 ? sigma / std::numbers::sqrt2 : sigma;
  return StableSpec{static_cast<double>(p.alpha), policy_mode(p, s), scale};
}

double sample_action(const PolicyParams& p, const FeatureVector& s,
                     Stream& rng) {
  return sample_sas(action_distribution(p, s), rng);
}

double log_likelihood(const PolicyParams& p, const FeatureVector& s,
                      double a) {
  return log_density(action_distribution(p, s), a);
}

std::vector<double> score(const PolicyParams& p, const FeatureVector& s,
                          double a) {
  p.validate();
  const double x0 = policy_mode(p, s);
  const double sigma = policy_scale(p);
  const double u = (a - x0) / sigma;

  double d_mode;   // d log pi / d x0
  double d_scale;  // d log pi / d log sigma
  if (p.alpha == 1) {
    const double q = 1.0 + u * u;
    d_mode = 2.0 * u / (sigma * q);
    d_scale = 2.0 * u * u / q - 1.0;
  } else {
    d_mode = u / sigma;
    d_scale = u * u - 1.0;
  }

  std::vector<double> g(p.size(), 0.0);
  const auto fv = s.values();
  for (std::size_t i = 0; i < fv.size(); ++i) g[i] = d_mode * fv[i];
  if (p.adaptive()) {
    std::fill(g.begin() + static_cast<std::ptrdiff_t>(fv.size()), g.end(),
              d_scale);
  }
  return g;
}

std::vector<double> clip_score(std::span<const double> g, double epsilon,
                               ClipMode mode) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("clip epsilon must lie in (0, 1)");
  }
  const double lo = 1.0 - epsilon;
  const double hi = 1.0 + epsilon;
  std::vector<double> out(g.begin(), g.end());
  for (double& x : out) {
    if (mode == ClipMode::Literal) {
      x = std::min(x, std::clamp(x, lo, hi));
    } else {
      x = std::clamp(x, -hi, hi);
    }
  }
  return out;
}

}  // namespace htpg
