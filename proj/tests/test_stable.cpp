#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "htpg/error.hpp"
#include "htpg/random.hpp"
#include "htpg/stable.hpp"

using namespace htpg;

namespace {

constexpr double kPi = std::numbers::pi;

StableSpec S(double alpha, double location = 0.0, double scale = 1.0) {
  return StableSpec{alpha, location, scale};
}

// Gaussian with variance 2 s^2, written out independently of the library.
double gaussian_log_pdf(double x, double loc, double s) {
  const double var = 2.0 * s * s;
  return -0.5 * std::log(2.0 * kPi * var) - (x - loc) * (x - loc) / (2.0 * var);
}

double cauchy_log_pdf(double x, double loc, double s) {
  const double u = (x - loc) / s;
  return -std::log(kPi * s) - std::log1p(u * u);
}

}  // namespace

TEST_CASE("stream reproducibility and splitting") {
  Stream a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

  Stream root(7);
  Stream c1 = root.split(1), c1b = root.split(1), c2 = root.split(2);
  CHECK(c1.next_u64() == c1b.next_u64());
  CHECK(c1.next_u64() != c2.next_u64());

  Stream copy = root;
  CHECK(copy.uniform() == root.uniform());

  Stream u(3);
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform_open();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    const double y = u.uniform();
    REQUIRE(y >= 0.0);
    REQUIRE(y < 1.0);
  }
}

TEST_CASE("stable spec validation") {
  CHECK_NOTHROW(S(2.0, 0.0, 1.0).validate());
  CHECK_NOTHROW(S(0.5, 0.0, 1.0).validate());
  CHECK_THROWS_AS(S(0.0, 0.0, 1.0).validate(), ParameterError);
  CHECK_THROWS_AS(S(2.5, 0.0, 1.0).validate(), ParameterError);
  CHECK_THROWS_AS(S(1.0, 0.0, 0.0).validate(), ParameterError);
  CHECK_THROWS_AS(S(1.0, 0.0, -1.0).validate(), ParameterError);
  CHECK_THROWS_AS(S(1.0, 0.0, INFINITY).validate(), ParameterError);
  CHECK(S(1.0).has_closed_form());
  CHECK(S(2.0).has_closed_form());
  CHECK_FALSE(S(1.5).has_closed_form());
}

TEST_CASE("log density closed forms") {
  CHECK(log_density(S(1.0, 0.0, 1.0), 0.0) == doctest::Approx(-std::log(kPi)).epsilon(1e-15));
  CHECK(log_density(S(1.0, 3.0, 2.0), 5.0) ==
        doctest::Approx(-std::log(4.0 * kPi)).epsilon(1e-15));
  CHECK(log_density(S(2.0, 0.0, 1.0), 0.0) ==
        doctest::Approx(-0.5 * std::log(4.0 * kPi)).epsilon(1e-15));

  for (double x : {-7.5, -1.0, 0.0, 0.3, 2.0, 40.0}) {
    CHECK(log_density(S(1.0, 0.7, 1.3), x) ==
          doctest::Approx(cauchy_log_pdf(x, 0.7, 1.3)).epsilon(1e-13));
    CHECK(log_density(S(2.0, -0.4, 0.6), x) ==
          doctest::Approx(gaussian_log_pdf(x, -0.4, 0.6)).epsilon(1e-13));
  }
}

TEST_CASE("log density is exactly symmetric about the location") {
  Stream rng(11);
  for (int i = 0; i < 1000; ++i) {
    // Dyadic offsets keep location +- x exactly representable.
    const double loc = std::ldexp(std::floor(rng.uniform() * 1024.0) - 512.0, -6);
    const double x = std::ldexp(std::floor(rng.uniform() * 2048.0), -7);
    for (double alpha : {1.0, 2.0}) {
      const auto s = S(alpha, loc, 0.1 + rng.uniform());
      REQUIRE(log_density(s, loc + x) == log_density(s, loc - x));
    }
  }
}

TEST_CASE("unsupported members reject closed forms") {
  const StableSpec s{1.5, 0.0, 1.0};
  CHECK_THROWS_AS(log_density(s, 0.0), UnsupportedMemberError);
  CHECK_THROWS_AS(cdf(s, 0.0), UnsupportedMemberError);
  CHECK_THROWS_AS(tail_probability(s, 1.0), UnsupportedMemberError);
  Stream rng(1);
  CHECK(std::isfinite(sample_sas(s, rng)));
}

TEST_CASE("tail probabilities") {
  CHECK(tail_probability({1.0}, 5.0) ==
        doctest::Approx(2.0 / kPi * std::atan(0.2)).epsilon(1e-15));
  CHECK(tail_probability({1.0}, 5.0) == doctest::Approx(0.1256659).epsilon(1e-6));
  CHECK(tail_probability({1.0}, 1e-12) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(tail_probability({2.0}, 5.0) == doctest::Approx(std::erfc(2.5)).epsilon(1e-15));
  CHECK(tail_probability({2.0}, 5.0) == doctest::Approx(5.733e-7).epsilon(1e-3));
  CHECK_THROWS_AS(tail_probability({1.0}, 0.0), ParameterError);
  CHECK_THROWS_AS(tail_probability({1.0}, -1.0), ParameterError);

  // Agreement with the CDF.
  for (double t : {0.5, 1.0, 3.0}) {
    for (double alpha : {1.0, 2.0}) {
      const StableSpec s{alpha, 0.0, 1.0};
      CHECK(tail_probability(s, t) ==
            doctest::Approx(2.0 * (1.0 - cdf(s, t))).epsilon(1e-10));
    }
  }
}

TEST_CASE("tails are monotone and the Cauchy tail dominates") {
  double prev_c = 1.0, prev_g = 1.0;
  for (double t = 0.05; t < 30.0; t += 0.05) {
    const double c = tail_probability({1.0}, t);
    const double g = tail_probability({2.0}, t);
    REQUIRE(c < prev_c);
    REQUIRE(g <= prev_g);
    if (g > 0.0) REQUIRE(g < prev_g);
    if (t >= 1.0) REQUIRE(c > g);
    prev_c = c;
    prev_g = g;
  }
}

TEST_CASE("cdf closed forms") {
  CHECK(cdf(S(1.0, 0.0, 1.0), 0.0) == doctest::Approx(0.5));
  CHECK(cdf(S(1.0, 0.0, 1.0), 1.0) == doctest::Approx(0.75));
  CHECK(cdf(S(2.0, 1.0, 1.0), 1.0) == doctest::Approx(0.5));
  // Variance 2: P(X <= sqrt 2) = Phi(1).
  CHECK(cdf(S(2.0, 0.0, 1.0), std::sqrt(2.0)) == doctest::Approx(0.8413447460685429));
  CHECK(cauchy_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cauchy_quantile(0.75) == doctest::Approx(1.0));
}

TEST_CASE("samplers agree with the analytic CDF") {
  Stream rng(2024);
  for (double alpha : {1.0, 2.0}) {
    std::vector<double> xs(100000);
    for (double& x : xs) x = sample_sas(S(alpha, 0.0, 1.0), rng);
    CHECK(ks_statistic(xs, S(alpha)) < 0.01);
  }
  for (double alpha : {1.0, 2.0}) {
    std::vector<double> xs(100000);
    for (double& x : xs) x = cms_standard(alpha, rng);
    CHECK(ks_statistic(xs, S(alpha)) < 0.01);
  }
}

TEST_CASE("Gaussian member has variance 2 sigma^2") {
  Stream rng(5);
  const int n = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_sas(S(2.0, 0.0, 1.5), rng);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(s2 / n - mean * mean == doctest::Approx(2.0 * 2.25).epsilon(0.01));
}

TEST_CASE("scale equivariance on a shared stream") {
  for (double alpha : {0.7, 1.0, 1.5, 2.0}) {
    Stream a(99), b(99);
    for (int i = 0; i < 1000; ++i) {
      const double scaled = sample_sas(S(alpha, -2.0, 3.5), a);
      const double unit = sample_sas(S(alpha, 0.0, 1.0), b);
      REQUIRE(scaled == -2.0 + 3.5 * unit);
    }
  }
}

TEST_CASE("CMS for a non closed-form member is symmetric and heavy tailed") {
  Stream rng(8);
  const int n = 200000;
  int pos = 0, far = 0;
  for (int i = 0; i < n; ++i) {
    const double x = cms_standard(1.5, rng);
    REQUIRE(std::isfinite(x));
    pos += x > 0.0;
    far += std::abs(x) > 5.0;
  }
  CHECK(static_cast<double>(pos) / n == doctest::Approx(0.5).epsilon(0.01));
  // Strictly between the Gaussian and Cauchy 5-scale tails.
  const double frac = static_cast<double>(far) / n;
  CHECK(frac > tail_probability({2.0}, 5.0));
  CHECK(frac < tail_probability({1.0}, 5.0));
}

TEST_CASE("distribution self-test suite passes") {
  const auto results = run_distribution_checks(12345);
  CHECK(results.size() >= 6);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
