// Command-line front end. Talks to the library only through htpg.h.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "htpg/htpg.h"

namespace {

int exit_code(htpg_status s) {
  switch (s) {
    case HTPG_OK:
      return 0;
    case HTPG_ERR_NOT_FOUND:
    case HTPG_ERR_CONFIG:
    case HTPG_ERR_PARAMETER:
    case HTPG_ERR_SCHEDULE:
      return 2;
    default:
      return 1;
  }
}

int report(htpg_status s) {
  std::fprintf(stderr, "error (%s): %s\n", htpg_status_name(s), htpg_last_error());
  return exit_code(s);
}

std::string fmt_exit(double v) {
  if (std::isinf(v)) return "never";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

struct TrainArgs {
  std::string config;
  std::string out;
  std::vector<uint64_t> seeds;
  bool replot = false;
  unsigned threads = 0;
};

int cmd_train(const TrainArgs& a) {
  htpg_config* cfg = nullptr;
  if (htpg_status s = htpg_config_load(a.config.c_str(), &cfg); s != HTPG_OK) {
    return report(s);
  }
  int rc = 0;
  htpg_experiment* exp = nullptr;
  htpg_status s = HTPG_OK;
  if (!a.out.empty()) s = htpg_config_set_output(cfg, a.out.c_str());
  if (s == HTPG_OK && !a.seeds.empty()) {
    s = htpg_config_set_seeds(cfg, a.seeds.data(), a.seeds.size());
  }
  if (s == HTPG_OK && a.replot) {
    s = htpg_replot(htpg_config_output(cfg), htpg_config_name(cfg));
    if (s == HTPG_OK) {
      std::printf("replotted %s/%s.svg\n", htpg_config_output(cfg), htpg_config_name(cfg));
    }
  } else if (s == HTPG_OK) {
    s = htpg_experiment_run(cfg, a.threads, &exp);
  }
  if (s != HTPG_OK) {
    rc = report(s);
  } else if (exp) {
    std::printf("%-12s %8s %9s %14s %10s %8s\n", "family", "seed", "episodes",
                "final_avg_100", "goal_hits", "status");
    for (size_t i = 0; i < htpg_experiment_run_count(exp); ++i) {
      htpg_run_info info;
      htpg_experiment_run_info(exp, i, &info);
      std::printf("%-12s %8llu %9lld %14.4f %10lld %8s\n", info.family,
                  static_cast<unsigned long long>(info.seed),
                  static_cast<long long>(info.episodes), info.final_avg_return_100,
                  static_cast<long long>(info.goal_episodes),
                  info.diverged ? "diverged" : "ok");
    }
    std::printf("aggregate: %s\nchart: %s\n", htpg_experiment_aggregate_path(exp),
                htpg_experiment_svg_path(exp));
  }
  htpg_experiment_free(exp);
  htpg_config_free(cfg);
  return rc;
}

int cmd_check_bound(const htpg_bound_request& req) {
  htpg_bound_report rep;
  if (htpg_status s = htpg_check_bound(&req, &rep); s != HTPG_OK) return report(s);
  std::printf("N=%lld seeds=%lld b=%g L1J=%g Y1=%g Y2=%g\n",
              static_cast<long long>(req.n), static_cast<long long>(rep.seeds),
              req.b, req.l1j, req.y1, req.y2);
  std::printf("lhs=%.6g (stderr %.3g)\nrhs=%.6g\nholds=%s\n", rep.lhs,
              rep.lhs_stderr, rep.rhs, rep.holds ? "true" : "false");
  return rep.holds ? 0 : 1;
}

struct FirstExitArgs {
  std::string config;
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int64_t episodes = 1000;
  unsigned threads = 0;
};

int cmd_first_exit(const FirstExitArgs& a) {
  htpg_config* cfg = nullptr;
  htpg_status s = a.config.empty()
                      ? htpg_config_first_exit(a.seeds.data(), a.seeds.size(),
                                               a.episodes, &cfg)
                      : htpg_config_load(a.config.c_str(), &cfg);
  if (s == HTPG_OK && !a.config.empty()) {
    s = htpg_config_set_seeds(cfg, a.seeds.data(), a.seeds.size());
  }
  htpg_first_exit_report rep;
  if (s == HTPG_OK) s = htpg_first_exit_run(cfg, a.threads, &rep);
  htpg_config_free(cfg);
  if (s != HTPG_OK) return report(s);
  for (int i = 0; i < 2; ++i) {
    std::printf("median_first_exit[%s]=%s\n", rep.family[i],
                fmt_exit(rep.median_exit[i]).c_str());
  }
  std::printf("earlier=%d later=%d ties=%d\nsign_test_p=%.6g\n", rep.wins,
              rep.losses, rep.ties, rep.sign_test_p);
  return 0;
}

void print_check(const char* name, int passed, const char* detail, void*) {
  std::printf("%s %s (%s)\n", passed ? "PASS" : "FAIL", name, detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed exploratory policy search"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Run a training sweep from a config file");
  t->add_option("--config", train.config, "Experiment config")->required();
  t->add_option("--out", train.out, "Output directory (overrides run.outputs)");
  t->add_option("--seeds", train.seeds, "Comma-separated seeds")->delimiter(',');
  t->add_flag("--replot", train.replot, "Regenerate the chart from aggregate.csv");
  t->add_option("--threads", train.threads, "Parallel runs (default HTPG_THREADS)");

  htpg_bound_request bound;
  htpg_bound_request_defaults(&bound);
  bool lipschitz = false;
  auto* cb = app.add_subcommand("check-bound", "Noisy-gradient testbed against the averaged gradient bound");
  cb->add_option("--b", bound.b, "Step exponent, alpha_k = k^-b")->capture_default_str();
  cb->add_option("--n", bound.n, "Iterations N")->capture_default_str();
  cb->add_option("--seeds", bound.seeds, "Seeds averaged")->capture_default_str();
  cb->add_option("--y1", bound.y1, "Noise floor Y1")->capture_default_str();
  cb->add_option("--y2", bound.y2, "Gradient-proportional noise Y2")->capture_default_str();
  cb->add_option("--l1j", bound.l1j, "Declared gradient Lipschitz constant")->capture_default_str();
  cb->add_option("--u-r", bound.u_r, "Reward bound U_R")->capture_default_str();
  cb->add_option("--gamma", bound.gamma, "Discount")->capture_default_str();
  cb->add_option("--base-seed", bound.base_seed, "Root seed")->capture_default_str();
  cb->add_flag("--lipschitz", lipschitz, "Use the Lipschitz-aware update");

  FirstExitArgs fe;
  auto* f = app.add_subcommand("first-exit", "Cauchy vs Gaussian escape from the false goal");
  f->add_option("--config", fe.config, "Config whose first two families are compared");
  f->add_option("--seeds", fe.seeds, "Comma-separated seeds")->delimiter(',');
  f->add_option("--episodes", fe.episodes, "Episodes per run")->capture_default_str();
  f->add_option("--threads", fe.threads, "Parallel runs");

  uint64_t dist_seed = 12345;
  auto* d = app.add_subcommand("dist-tests", "Statistical checks of the stable-law samplers");
  d->add_option("--seed", dist_seed, "Root seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*t) return cmd_train(train);
  if (*cb) {
    bound.lipschitz_update = lipschitz ? 1 : 0;
    return cmd_check_bound(bound);
  }
  if (*f) return cmd_first_exit(fe);
  if (*d) {
    int ok = 0;
    if (htpg_status s = htpg_dist_tests(dist_seed, print_check, nullptr, &ok); s != HTPG_OK) {
      return report(s);
    }
    std::printf("%s\n", ok ? "all distribution checks passed" : "distribution checks FAILED");
    return ok ? 0 : 1;
  }
  return 0;
}
