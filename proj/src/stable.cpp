#include "htpg/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "htpg/error.hpp"

namespace htpg {

namespace {

constexpr double kPi = std::numbers::pi;

void require_closed_form(const StableSpec& spec) {
  spec.validate();
  if (!spec.has_closed_form()) {
    std::ostringstream os;
    os << "no closed form for alpha = " << spec.alpha
       << "; only alpha in {1, 2} support densities";
    throw UnsupportedMemberError(os.str());
  }
}

std::string describe(double value, double target) {
  std::ostringstream os;
  os.precision(6);
  os << "observed " << value << ", target " << target;
  return os.str();
}

}  // namespace

void StableSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ParameterError("stable alpha must lie in (0, 2]");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("stable scale must be positive and finite");
  }
  if (!std::isfinite(location)) {
    throw ParameterError("stable location must be finite");
  }
}

double cauchy_quantile(double u) { return std::tan(kPi * (u - 0.5)); }

double cms_standard(double alpha, Stream& rng) {
  const double v = kPi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0) {
    return std::tan(v);
  }
  const double a = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
  const double b =
      std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return a * b;
}

double sample_sas(const StableSpec& spec, Stream& rng) {
  spec.validate();
  double z;
  if (spec.alpha == 1.0) {
    z = cauchy_quantile(rng.uniform_open());
  } else if (spec.alpha == 2.0) {
    z = std::numbers::sqrt2 * rng.normal();
  } else {
    z = cms_standard(spec.alpha, rng);
  }
  return spec.location + spec.scale * z;
}

double log_density(const StableSpec& spec, double x) {
  require_closed_form(spec);
  const double u = (x - spec.location) / spec.scale;
  if (spec.alpha == 1.0) {
    return -std::log(spec.scale * kPi * (1.0 + u * u));
  }
  // variance 2 scale^2
  return -std::log(2.0 * spec.scale * std::sqrt(kPi)) - 0.25 * u * u;
}

double cdf(const StableSpec& spec, double x) {
  require_closed_form(spec);
  const double u = (x - spec.location) / spec.scale;
  if (spec.alpha == 1.0) {
    return 0.5 + std::atan(u) / kPi;
  }
  return 0.5 * std::erfc(-0.5 * u);
}

double tail_probability(const StableSpec& spec, double threshold) {
  require_closed_form(spec);
  if (!(threshold > 0.0)) {
    throw ParameterError("tail threshold must be positive");
  }
  if (spec.alpha == 1.0) {
    return (2.0 / kPi) * std::atan(1.0 / threshold);
  }
  return std::erfc(0.5 * threshold);
}

double ks_statistic(std::vector<double>& samples, const StableSpec& spec) {
  require_closed_form(spec);
  if (samples.empty()) {
    throw ParameterError("KS statistic needs at least one sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(spec, samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

std::vector<CheckResult> run_distribution_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  Stream root(seed);

  const StableSpec cauchy{1.0, 0.0, 1.0};
  const StableSpec gauss{2.0, 0.0, 1.0};

  auto ks_check = [&](const std::string& name, const StableSpec& spec,
                      auto&& draw, std::uint64_t id) {
    Stream rng = root.split(id);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = draw(rng);
    const double d = ks_statistic(xs, spec);
    out.push_back({name, d < 0.01, describe(d, 0.01) + " (upper limit)"});
  };

  ks_check("ks_cauchy_closed_form", cauchy,
           [&](Stream& r) { return sample_sas(cauchy, r); }, 1);
  ks_check("ks_gaussian_closed_form", gauss,
           [&](Stream& r) { return sample_sas(gauss, r); }, 2);
  ks_check("ks_cms_alpha1_vs_cauchy", cauchy,
           [](Stream& r) { return cms_standard(1.0, r); }, 3);
  ks_check("ks_cms_alpha2_vs_gaussian", gauss,
           [](Stream& r) { return cms_standard(2.0, r); }, 4);

  {
    Stream rng = root.split(5);
    constexpr int n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_sas(gauss, rng);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    out.push_back({"alpha2_variance_is_2sigma2",
                   std::abs(var - 2.0) <= 0.02 * 2.0, describe(var, 2.0)});
  }
  {
    Stream rng = root.split(6);
    constexpr int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(sample_sas(cauchy, rng)) > 5.0) ++hits;
    }
    const double p = static_cast<double>(hits) / n;
    const double target = tail_probability(cauchy, 5.0);
    out.push_back({"cauchy_tail_beyond_5",
                   std::abs(p - target) <= 0.1 * target, describe(p, target)});
  }
  {
    bool ok = true;
    for (const auto& spec : {StableSpec{1.0, 0.75, 1.3}, StableSpec{2.0, -2.0, 0.4}}) {
      for (double x = 0.0; x < 20.0; x += 0.375) {
        ok = ok && log_density(spec, spec.location + x) ==
                       log_density(spec, spec.location - x);
      }
    }
    out.push_back({"log_density_symmetry", ok, "exact equality on a dyadic grid"});
  }
  {
    bool ok = true;
    double prev_c = 2.0, prev_g = 2.0;
    for (double t = 1.0; t <= 30.0; t += 0.5) {
      const double c = tail_probability(cauchy, t);
      const double g = tail_probability(gauss, t);
      ok = ok && c < prev_c && g <= prev_g && c > g;
      prev_c = c;
      prev_g = g;
    }
    out.push_back({"tail_monotone_and_cauchy_heavier", ok,
                   "thresholds 1..30 step 0.5"});
  }
  return out;
}

}  // namespace htpg
