#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "htpg/htpg.h"

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"(
[run]
name = "capi"
seeds = [1, 2]

[env]
kind = "trapped_car"

[train]
episodes = 20

[policy.cauchy]
alpha = 1

[policy.gaussian]
alpha = 2
)";

htpg_config* parse(const std::string& text) {
  htpg_config* cfg = nullptr;
  REQUIRE(htpg_config_parse(text.data(), text.size(), &cfg) == HTPG_OK);
  REQUIRE(cfg != nullptr);
  return cfg;
}

std::string slurp(const char* path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Seen {
  int total = 0;
  int failed = 0;
};

void count_check(const char*, int passed, const char*, void* user) {
  auto* s = static_cast<Seen*>(user);
  ++s->total;
  s->failed += passed ? 0 : 1;
}

}  // namespace

TEST_CASE("status names, version and error text") {
  CHECK(std::string(htpg_version()) == "1.0.0");
  CHECK(std::string(htpg_status_name(HTPG_OK)) == "ok");
  CHECK(std::string(htpg_status_name(HTPG_ERR_CONFIG)) == "config error");
  CHECK(std::string(htpg_status_name(HTPG_ERR_NOT_FOUND)) == "not found");
  CHECK(std::string(htpg_status_name(static_cast<htpg_status>(42))) == "unknown");

  double v = 0.0;
  CHECK(htpg_sas_log_density(1.0, 0.0, -1.0, 0.0, &v) == HTPG_ERR_PARAMETER);
  CHECK(std::strlen(htpg_last_error()) > 0);
  CHECK(htpg_sas_log_density(1.0, 0.0, 1.0, 0.0, &v) == HTPG_OK);
  CHECK(std::string(htpg_last_error()).empty());
  CHECK(htpg_sas_log_density(1.0, 0.0, 1.0, 0.0, nullptr) == HTPG_ERR_PARAMETER);
}

TEST_CASE("distribution functions") {
  double v = 0.0;
  REQUIRE(htpg_sas_log_density(1.0, 0.0, 1.0, 0.0, &v) == HTPG_OK);
  CHECK(v == doctest::Approx(-std::log(M_PI)));
  REQUIRE(htpg_sas_log_density(2.0, 0.0, 1.0, 0.0, &v) == HTPG_OK);
  CHECK(v == doctest::Approx(-0.5 * std::log(4.0 * M_PI)));
  CHECK(htpg_sas_log_density(1.5, 0.0, 1.0, 0.0, &v) == HTPG_ERR_UNSUPPORTED);

  REQUIRE(htpg_sas_tail_probability(1.0, 5.0, &v) == HTPG_OK);
  CHECK(v == doctest::Approx(0.1256659).epsilon(1e-6));
  REQUIRE(htpg_sas_tail_probability(2.0, 5.0, &v) == HTPG_OK);
  CHECK(v == doctest::Approx(std::erfc(2.5)));
  CHECK(htpg_sas_tail_probability(1.0, -1.0, &v) == HTPG_ERR_PARAMETER);
}

TEST_CASE("self-test callback") {
  Seen seen;
  int all = 0;
  REQUIRE(htpg_dist_tests(7, count_check, &seen, &all) == HTPG_OK);
  CHECK(seen.total >= 6);
  CHECK(seen.failed == 0);
  CHECK(all == 1);
  all = 0;
  CHECK(htpg_dist_tests(7, nullptr, nullptr, &all) == HTPG_OK);
  CHECK(all == 1);
}

TEST_CASE("config handles") {
  htpg_config* cfg = parse(kConfig);
  CHECK(std::string(htpg_config_name(cfg)) == "capi");
  CHECK(htpg_config_family_count(cfg) == 2);
  CHECK(htpg_config_seed_count(cfg) == 2);

  const uint64_t seeds[] = {5, 6, 7};
  CHECK(htpg_config_set_seeds(cfg, seeds, 3) == HTPG_OK);
  CHECK(htpg_config_seed_count(cfg) == 3);
  const uint64_t dup[] = {5, 5};
  CHECK(htpg_config_set_seeds(cfg, dup, 2) == HTPG_ERR_CONFIG);
  CHECK(htpg_config_seed_count(cfg) == 3);

  CHECK(htpg_config_set_output(cfg, "/tmp/x") == HTPG_OK);
  CHECK(std::string(htpg_config_output(cfg)) == "/tmp/x");
  CHECK(htpg_config_set_episodes(cfg, 10) == HTPG_OK);
  CHECK(htpg_config_set_episodes(cfg, -1) != HTPG_OK);
  htpg_config_free(cfg);
  htpg_config_free(nullptr);

  htpg_config* bad = nullptr;
  const std::string text = "[run]\nseeds = [1]\n";
  CHECK(htpg_config_parse(text.data(), text.size(), &bad) == HTPG_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::string(htpg_last_error()).find("policy") != std::string::npos);

  CHECK(htpg_config_load("/nonexistent/x.toml", &bad) == HTPG_ERR_NOT_FOUND);
  CHECK(htpg_config_load(nullptr, &bad) == HTPG_ERR_PARAMETER);
  CHECK(htpg_config_name(nullptr) == std::string());
}

TEST_CASE("experiment run through the C interface") {
  const auto dir = fs::temp_directory_path() / "htpg_capi_exp";
  fs::remove_all(dir);
  htpg_config* cfg = parse(kConfig);
  REQUIRE(htpg_config_set_output(cfg, dir.string().c_str()) == HTPG_OK);

  htpg_experiment* a = nullptr;
  htpg_experiment* b = nullptr;
  REQUIRE(htpg_experiment_run(cfg, 1, &a) == HTPG_OK);
  REQUIRE(htpg_experiment_run_count(a) == 4);

  htpg_run_info info{};
  REQUIRE(htpg_experiment_run_info(a, 0, &info) == HTPG_OK);
  CHECK(std::string(info.family) == "cauchy");
  CHECK(info.seed == 1);
  CHECK(info.episodes == 20);
  CHECK(info.diverged == 0);
  CHECK(info.goal_episodes >= 0);
  CHECK(info.goal_episodes <= 20);
  CHECK(fs::exists(info.csv_path));
  const std::string first = slurp(info.csv_path);
  REQUIRE(htpg_experiment_run_info(a, 3, &info) == HTPG_OK);
  CHECK(std::string(info.family) == "gaussian");
  CHECK(info.seed == 2);
  CHECK(htpg_experiment_run_info(a, 4, &info) == HTPG_ERR_PARAMETER);
  CHECK(fs::exists(htpg_experiment_aggregate_path(a)));
  CHECK(fs::exists(htpg_experiment_svg_path(a)));

  REQUIRE(htpg_experiment_run(cfg, 2, &b) == HTPG_OK);
  REQUIRE(htpg_experiment_run_info(b, 0, &info) == HTPG_OK);
  CHECK(slurp(info.csv_path) == first);

  const std::string svg = slurp(htpg_experiment_svg_path(a));
  fs::remove(htpg_experiment_svg_path(a));
  CHECK(htpg_replot(dir.string().c_str(), "capi") == HTPG_OK);
  CHECK(slurp(htpg_experiment_svg_path(a)) == svg);
  CHECK(htpg_replot("/nonexistent/dir", "capi") == HTPG_ERR_NOT_FOUND);

  htpg_experiment_free(a);
  htpg_experiment_free(b);
  htpg_config_free(cfg);
  fs::remove_all(dir);
}

TEST_CASE("bound through the C interface") {
  htpg_bound_request req;
  htpg_bound_request_defaults(&req);
  req.u_r = 1.0;
  req.l1j = 1.0;
  req.y1 = 1.0;
  double rhs = 0.0;
  REQUIRE(htpg_bound_rhs(&req, 10000, &rhs) == HTPG_OK);
  CHECK(rhs == doctest::Approx(1.0499).epsilon(1e-12));
  CHECK(htpg_bound_rhs(&req, 0, &rhs) == HTPG_ERR_PARAMETER);

  htpg_bound_request_defaults(&req);
  req.n = 1000;
  req.seeds = 5;
  htpg_bound_report rep{};
  REQUIRE(htpg_check_bound(&req, &rep) == HTPG_OK);
  CHECK(rep.seeds == 5);
  CHECK(rep.holds == (rep.lhs <= rep.rhs ? 1 : 0));
  CHECK(rep.holds == 1);
  req.b = 1.0;
  CHECK(htpg_check_bound(&req, &rep) == HTPG_ERR_PARAMETER);
}

TEST_CASE("first-exit comparison through the C interface") {
  const uint64_t seeds[] = {1, 2, 3, 4, 5};
  htpg_config* few = nullptr;
  REQUIRE(htpg_config_first_exit(seeds, 3, 30, &few) == HTPG_OK);
  htpg_first_exit_report rep{};
  CHECK(htpg_first_exit_run(few, 1, &rep) == HTPG_ERR_PARAMETER);
  htpg_config_free(few);

  htpg_config* cfg = nullptr;
  REQUIRE(htpg_config_first_exit(seeds, 5, 30, &cfg) == HTPG_OK);
  CHECK(htpg_config_family_count(cfg) == 2);
  REQUIRE(htpg_first_exit_run(cfg, 1, &rep) == HTPG_OK);
  CHECK(std::string(rep.family[0]) == "cauchy");
  CHECK(std::string(rep.family[1]) == "gaussian");
  CHECK(rep.wins + rep.losses + rep.ties == 5);
  CHECK(rep.sign_test_p > 0.0);
  CHECK(rep.sign_test_p <= 1.0);
  htpg_config_free(cfg);

  htpg_config* one = parse(std::string("[run]\nseeds = [1]\n[policy.c]\nalpha = 1\n"));
  CHECK(htpg_first_exit_run(one, 1, &rep) == HTPG_ERR_PARAMETER);
  htpg_config_free(one);
}
