#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "doctest.h"
#include "htpg/analysis.hpp"
#include "htpg/error.hpp"

using namespace htpg;

namespace {

// Independent evaluation of the bound in extended precision.
long double rhs_oracle(long double u_r, long double gamma, long double l,
                       long double y1, long double b, long double n) {
  const long double first = 2.0L * u_r / (1.0L - gamma) * std::pow(n, b - 1.0L);
  const long double second = l * y1;
  const long double third =
      l * y1 * b / (n * (1.0L - b)) * (std::pow(n, 1.0L - b) - 1.0L);
  return first + second + third;
}

RunMetrics exits_at(std::optional<std::int64_t> ep) {
  RunMetrics m;
  m.first_exit_episode = ep;
  return m;
}

FamilyRuns family(const std::string& name, std::vector<std::optional<std::int64_t>> exits) {
  FamilyRuns f{name, {}};
  for (auto e : exits) f.runs.push_back(exits_at(e));
  return f;
}

Trajectory sampled(const PolicyParams& p, const FeatureVector& s, int n, Stream& rng) {
  Trajectory t;
  t.steps.resize(static_cast<std::size_t>(n));
  for (auto& tr : t.steps) {
    tr.features = s;
    tr.action = sample_action(p, s, rng);
  }
  return t;
}

}  // namespace

TEST_CASE("bound right-hand side") {
  BoundParams p;
  p.u_r = 1.0;
  p.gamma = 0.5;
  p.l1j = 1.0;
  p.y1 = 1.0;
  p.b = 0.5;
  CHECK(bound_rhs(p, 10000) == doctest::Approx(1.0499).epsilon(1e-12));
  CHECK(bound_rhs(p, 1) == doctest::Approx(2.0 * 1.0 / 0.5 + 1.0).epsilon(1e-15));
  CHECK(bound_rhs(p, 10000) < bound_rhs(p, 100));
  CHECK_THROWS_AS(bound_rhs(p, 0), ParameterError);

  Stream rng(1);
  for (int i = 0; i < 500; ++i) {
    BoundParams q;
    q.u_r = 0.1 + 10.0 * rng.uniform();
    q.gamma = 0.01 + 0.98 * rng.uniform();
    q.l1j = 0.1 + 5.0 * rng.uniform();
    q.y1 = 0.01 + 2.0 * rng.uniform();
    q.b = 0.01 + 0.98 * rng.uniform();
    const auto n = static_cast<std::int64_t>(1 + 100000 * rng.uniform());
    const long double want = rhs_oracle(q.u_r, q.gamma, q.l1j, q.y1, q.b,
                                        static_cast<long double>(n));
    REQUIRE(bound_rhs(q, n) == doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
  }

  BoundParams bad = p;
  bad.b = 1.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = p;
  bad.y1 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("bump objective") {
  const BumpObjective j;
  const std::vector<double> zero{0.0, 0.0};
  CHECK(j.value(zero) == 0.0);
  CHECK(j.gradient(zero) == zero);
  Stream rng(2);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> t{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    REQUIRE(std::abs(j.value(t)) <= j.value_bound());
    const auto g = j.gradient(t);
    for (std::size_t k = 0; k < 2; ++k) {
      auto up = t, down = t;
      up[k] += 1e-6;
      down[k] -= 1e-6;
      REQUIRE(g[k] == doctest::Approx((j.value(up) - j.value(down)) / 2e-6).epsilon(1e-6));
    }
    // Gradient Lipschitz constant holds pairwise.
    const std::vector<double> s{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    const auto h = j.gradient(s);
    const double dg = std::hypot(g[0] - h[0], g[1] - h[1]);
    const double dt = std::hypot(t[0] - s[0], t[1] - s[1]);
    REQUIRE(dg <= j.gradient_lipschitz() * dt + 1e-12);
  }
}

TEST_CASE("noise model moments") {
  Stream rng(3);
  const std::vector<double> grad{0.3, -0.4};
  for (const NoiseModel nm : {NoiseModel{1.0, 0.0}, NoiseModel{0.1, 0.5}}) {
    const int n = 100000;
    double s0 = 0.0, s1 = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto w = nm.sample(grad, rng);
      s0 += w[0];
      s1 += w[1];
      sq += w[0] * w[0] + w[1] * w[1];
    }
    const double target = nm.y1 + nm.y2 * 0.25;
    CHECK(sq / n == doctest::Approx(target).epsilon(0.02));
    CHECK(std::abs(s0 / n) < 4.0 * std::sqrt(target / 2.0 / n));
    CHECK(std::abs(s1 / n) < 4.0 * std::sqrt(target / 2.0 / n));
  }
  CHECK_THROWS_AS((NoiseModel{-1.0, 0.0}.validate()), ParameterError);
}

TEST_CASE("synthetic ascent") {
  const BumpObjective j;
  Stream rng(4);
  const std::vector<double> origin{0.0, 0.0};
  const auto flat = synthetic_sga_run(j, NoiseModel{}, PowerDecay{0.5}, PlainAscent{},
                                      origin, 1000, rng);
  REQUIRE(flat.size() == 1000);
  for (double g : flat) REQUIRE(g == 0.0);

  const std::vector<double> near{0.1, -0.05};
  const auto run = synthetic_sga_run(j, NoiseModel{}, PowerDecay{0.5}, PlainAscent{},
                                     near, 1000, rng);
  for (std::size_t k = 1; k < run.size(); ++k) REQUIRE(run[k] <= run[k - 1]);
  CHECK(run.back() < run.front());

  BoundParams p;
  const auto report = check_bound(flat, p);
  CHECK(report.lhs == 0.0);
  CHECK(report.holds);
  CHECK(report.rhs == bound_rhs(p, 1000));
  CHECK_THROWS_AS(check_bound(std::vector<double>{}, p), ParameterError);

  // Same seed, same sequence.
  Stream a(9), b(9);
  CHECK(synthetic_sga_run(j, NoiseModel{1.0, 0.0}, PowerDecay{0.5}, PlainAscent{}, near, 500, a) ==
        synthetic_sga_run(j, NoiseModel{1.0, 0.0}, PowerDecay{0.5}, PlainAscent{}, near, 500, b));
}

TEST_CASE("seed-averaged bound holds on the synthetic testbed") {
  for (double y1 : {0.1, 1.0}) {
    for (std::int64_t n : {1000, 10000}) {
      BoundExperiment e;
      e.params.u_r = 0.5;
      e.params.gamma = 0.5;
      e.params.l1j = 2.0;
      e.params.y1 = y1;
      e.params.b = 0.5;
      e.n = n;
      e.seeds = 20;
      const auto r = run_bound_experiment(e);
      INFO("y1=" << y1 << " n=" << n << " lhs=" << r.lhs << " rhs=" << r.rhs);
      CHECK(r.seeds == 20);
      CHECK(r.lhs_stderr >= 0.0);
      CHECK(r.lhs > 0.0);
      CHECK(r.holds);
      CHECK(r.rhs == bound_rhs(e.params, n));
    }
  }
}

TEST_CASE("underestimated Lipschitz constant still gives a well-formed report") {
  BoundExperiment e;
  e.params.u_r = 0.5;
  e.params.gamma = 0.5;
  e.params.l1j = 0.02;
  e.params.y1 = 1.0;
  e.n = 1000;
  e.seeds = 5;
  const auto r = run_bound_experiment(e);
  CHECK(std::isfinite(r.lhs));
  CHECK(std::isfinite(r.rhs));
  CHECK(r.holds == (r.lhs <= r.rhs));

  std::vector<std::vector<double>> uneven{{1.0, 2.0}, {1.0}};
  CHECK_THROWS_AS(check_bound(uneven, e.params), ParameterError);
}

TEST_CASE("median and sign test") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({1.0, kNeverExited}) == kNeverExited);
  CHECK(median({1.0, 2.0, kNeverExited, kNeverExited}) == kNeverExited);
  CHECK_THROWS_AS(median({}), ParameterError);

  CHECK(sign_test_p_value(0, 0) == 1.0);
  CHECK(sign_test_p_value(8, 1) == doctest::Approx(10.0 / 512.0).epsilon(1e-12));
  CHECK(sign_test_p_value(10, 0) == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
  CHECK(sign_test_p_value(0, 10) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sign_test_p_value(5, 5) == doctest::Approx(638.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("first-exit statistics") {
  const auto a = family("a", {3, 5, std::nullopt, 7, 2});
  const auto same = first_exit_statistics({a, FamilyRuns{"b", a.runs}});
  CHECK(same.sign_test_p == 1.0);
  CHECK(same.families[0].median_exit == same.families[1].median_exit);
  CHECK(same.ties == 5);

  std::vector<std::optional<std::int64_t>> tens(10, 10), never(10, std::nullopt);
  const auto dom = first_exit_statistics({family("cauchy", tens), family("gaussian", never)});
  CHECK(dom.families[0].name == "cauchy");
  CHECK(dom.families[0].median_exit == 10.0);
  CHECK(dom.families[1].median_exit == kNeverExited);
  CHECK(dom.wins == 10);
  CHECK(dom.sign_test_p == doctest::Approx(std::pow(0.5, 10)));

  CHECK_THROWS_AS(first_exit_statistics({}), ParameterError);
  CHECK_THROWS_AS(first_exit_statistics({a}), ParameterError);
  CHECK_THROWS_AS(first_exit_statistics({family("x", {1, 2, 3}), family("y", {1, 2, 3})}),
                  ParameterError);
  CHECK_THROWS_AS(first_exit_statistics({a, family("y", {1, 2, 3, 4, 5, 6})}), ParameterError);
}

TEST_CASE("tail exploration ratio") {
  const FeatureVector s(std::vector<double>{0.4, -0.1, 1.0});
  PolicyParams p;
  p.theta_x0 = {1.0, 2.0, -0.5};
  p.theta_sigma = {0.3};

  Trajectory at_mode;
  at_mode.steps.resize(100);
  for (auto& tr : at_mode.steps) {
    tr.features = s;
    tr.action = policy_mode(p, s);
  }
  CHECK(tail_exploration_ratio(at_mode, p, 5.0) == 0.0);
  CHECK_THROWS_AS(tail_exploration_ratio(Trajectory{}, p, 5.0), ParameterError);

  Stream rng(5);
  p.alpha = 1;
  const double cauchy = tail_exploration_ratio(sampled(p, s, 100000, rng), p, 5.0);
  CHECK(cauchy == doctest::Approx(0.1257).epsilon(0.1));
  p.alpha = 2;
  const double gauss = tail_exploration_ratio(sampled(p, s, 100000, rng), p, 5.0);
  CHECK(gauss < 1e-4);
  CHECK(cauchy > gauss);

  for (double t : {1.0, 2.0, 3.0}) {
    p.alpha = 1;
    const double c = tail_exploration_ratio(sampled(p, s, 10000, rng), p, t);
    p.alpha = 2;
    const double g = tail_exploration_ratio(sampled(p, s, 10000, rng), p, t);
    CHECK(c > g);
  }
}
