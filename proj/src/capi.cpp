#include "htpg/htpg.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "htpg/analysis.hpp"
#include "htpg/config.hpp"
#include "htpg/error.hpp"
#include "htpg/experiment.hpp"
#include "htpg/stable.hpp"

struct htpg_config {
  htpg::ExperimentConfig cfg;
  std::string output;
};

struct htpg_experiment {
  htpg::ExperimentResult result;
  std::vector<std::string> csv_paths;
  std::string aggregate;
  std::string svg;
};

namespace {

thread_local std::string g_last_error;

htpg_status set_error(htpg_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs `fn`, translating exceptions into status codes.
template <class Fn>
htpg_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return HTPG_OK;
  } catch (const htpg::NotFoundError& e) {
    return set_error(HTPG_ERR_NOT_FOUND, e.what());
  } catch (const htpg::IoError& e) {
    return set_error(HTPG_ERR_IO, e.what());
  } catch (const htpg::ConfigError& e) {
    return set_error(HTPG_ERR_CONFIG, e.what());
  } catch (const htpg::UnsupportedMemberError& e) {
    return set_error(HTPG_ERR_UNSUPPORTED, e.what());
  } catch (const htpg::ScheduleError& e) {
    return set_error(HTPG_ERR_SCHEDULE, e.what());
  } catch (const htpg::DivergenceError& e) {
    return set_error(HTPG_ERR_DIVERGED, e.what());
  } catch (const htpg::UsageError& e) {
    return set_error(HTPG_ERR_USAGE, e.what());
  } catch (const htpg::ParameterError& e) {
    return set_error(HTPG_ERR_PARAMETER, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HTPG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HTPG_ERR_INTERNAL, e.what());
  }
}

htpg_status null_arg(const char* name) {
  return set_error(HTPG_ERR_PARAMETER,
                   (std::string("null argument: ") + name).c_str());
}

htpg::BoundExperiment to_experiment(const htpg_bound_request& r) {
  htpg::BoundExperiment e;
  e.params = {r.u_r, r.gamma, r.l1j, r.y1, r.b};
  e.y2 = r.y2;
  e.n = r.n;
  e.seeds = r.seeds;
  e.base_seed = r.base_seed;
  e.lipschitz_update = r.lipschitz_update != 0;
  return e;
}

}  // namespace

extern "C" {

const char* htpg_version(void) { return "1.0.0"; }

const char* htpg_last_error(void) { return g_last_error.c_str(); }

const char* htpg_status_name(htpg_status status) {
  switch (status) {
    case HTPG_OK: return "ok";
    case HTPG_ERR_PARAMETER: return "parameter error";
    case HTPG_ERR_UNSUPPORTED: return "unsupported member";
    case HTPG_ERR_USAGE: return "usage error";
    case HTPG_ERR_SCHEDULE: return "schedule error";
    case HTPG_ERR_DIVERGED: return "diverged";
    case HTPG_ERR_CONFIG: return "config error";
    case HTPG_ERR_IO: return "i/o error";
    case HTPG_ERR_NOT_FOUND: return "not found";
    case HTPG_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

htpg_status htpg_sas_log_density(double alpha, double location, double scale,
                                 double x, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = htpg::log_density(htpg::StableSpec{alpha, location, scale}, x);
  });
}

htpg_status htpg_sas_tail_probability(double alpha, double threshold,
                                      double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = htpg::tail_probability(htpg::StableSpec{alpha, 0.0, 1.0}, threshold);
  });
}

htpg_status htpg_dist_tests(uint64_t seed, htpg_check_fn cb, void* user,
                            int* all_passed) {
  return guarded([&] {
    bool ok = true;
    for (const auto& c : htpg::run_distribution_checks(seed)) {
      ok = ok && c.passed;
      if (cb) cb(c.name.c_str(), c.passed ? 1 : 0, c.detail.c_str(), user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

htpg_status htpg_config_load(const char* path, htpg_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<htpg_config>();
    h->cfg = htpg::load_config(path);
    h->output = h->cfg.outputs.string();
    *out = h.release();
  });
}

htpg_status htpg_config_parse(const char* text, size_t len, htpg_config** out) {
  if (!text && len) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<htpg_config>();
    h->cfg = htpg::parse_config(std::string_view(text ? text : "", len));
    h->output = h->cfg.outputs.string();
    *out = h.release();
  });
}

htpg_status htpg_config_first_exit(const uint64_t* seeds, size_t n_seeds,
                                   int64_t episodes, htpg_config** out) {
  if (!seeds && n_seeds) return null_arg("seeds");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    htpg::FirstExitRequest req;
    req.seeds.assign(seeds, seeds + n_seeds);
    req.episodes = episodes;
    auto h = std::make_unique<htpg_config>();
    h->cfg = htpg::first_exit_config(req);
    h->cfg.validate();
    h->output = h->cfg.outputs.string();
    *out = h.release();
  });
}

void htpg_config_free(htpg_config* cfg) { delete cfg; }

htpg_status htpg_config_set_seeds(htpg_config* cfg, const uint64_t* seeds,
                                  size_t n) {
  if (!cfg) return null_arg("cfg");
  if (!seeds && n) return null_arg("seeds");
  return guarded([&] {
    htpg::ExperimentConfig next = cfg->cfg;
    next.seeds.assign(seeds, seeds + n);
    next.validate();
    cfg->cfg = std::move(next);
  });
}

htpg_status htpg_config_set_output(htpg_config* cfg, const char* dir) {
  if (!cfg) return null_arg("cfg");
  if (!dir) return null_arg("dir");
  return guarded([&] {
    cfg->cfg.outputs = dir;
    cfg->output = dir;
  });
}

htpg_status htpg_config_set_episodes(htpg_config* cfg, int64_t episodes) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    htpg::ExperimentConfig next = cfg->cfg;
    next.train.episodes = episodes;
    if (auto* r = std::get_if<htpg::LinearRange>(&next.train.step_rule)) {
      r->count = std::max<int64_t>(episodes, 1);
    }
    next.validate();
    cfg->cfg = std::move(next);
  });
}

const char* htpg_config_name(const htpg_config* cfg) {
  return cfg ? cfg->cfg.name.c_str() : "";
}

const char* htpg_config_output(const htpg_config* cfg) {
  return cfg ? cfg->output.c_str() : "";
}

size_t htpg_config_family_count(const htpg_config* cfg) {
  return cfg ? cfg->cfg.families.size() : 0;
}

size_t htpg_config_seed_count(const htpg_config* cfg) {
  return cfg ? cfg->cfg.seeds.size() : 0;
}

htpg_status htpg_experiment_run(const htpg_config* cfg, unsigned threads,
                                htpg_experiment** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<htpg_experiment>();
    h->result = htpg::run_experiment(cfg->cfg, threads);
    for (const auto& r : h->result.runs) h->csv_paths.push_back(r.csv.string());
    h->aggregate = h->result.aggregate_csv.string();
    h->svg = h->result.svg.string();
    *out = h.release();
  });
}

void htpg_experiment_free(htpg_experiment* exp) { delete exp; }

size_t htpg_experiment_run_count(const htpg_experiment* exp) {
  return exp ? exp->result.runs.size() : 0;
}

htpg_status htpg_experiment_run_info(const htpg_experiment* exp, size_t index,
                                     htpg_run_info* out) {
  if (!exp) return null_arg("exp");
  if (!out) return null_arg("out");
  if (index >= exp->result.runs.size()) {
    return set_error(HTPG_ERR_PARAMETER, "run index out of range");
  }
  const auto& r = exp->result.runs[index];
  const auto& m = r.metrics;
  out->family = r.family.c_str();
  out->csv_path = exp->csv_paths[index].c_str();
  out->seed = r.seed;
  out->episodes = static_cast<int64_t>(m.episodes());
  out->final_avg_return_100 = m.moving_avg_100.empty() ? 0.0 : m.moving_avg_100.back();
  out->first_exit_episode = m.first_exit_episode ? *m.first_exit_episode : -1;
  out->goal_episodes = std::count(m.reached_goal.begin(), m.reached_goal.end(), true);
  out->diverged = m.divergence ? 1 : 0;
  return HTPG_OK;
}

const char* htpg_experiment_aggregate_path(const htpg_experiment* exp) {
  return exp ? exp->aggregate.c_str() : "";
}

const char* htpg_experiment_svg_path(const htpg_experiment* exp) {
  return exp ? exp->svg.c_str() : "";
}

htpg_status htpg_replot(const char* dir, const char* name) {
  if (!dir) return null_arg("dir");
  if (!name) return null_arg("name");
  return guarded([&] { htpg::replot(dir, name); });
}

void htpg_bound_request_defaults(htpg_bound_request* req) {
  if (!req) return;
  req->u_r = 0.5;
  req->gamma = 0.5;
  req->l1j = 2.0;
  req->y1 = 0.1;
  req->y2 = 0.0;
  req->b = 0.5;
  req->n = 10000;
  req->seeds = 20;
  req->base_seed = 1;
  req->lipschitz_update = 0;
}

htpg_status htpg_bound_rhs(const htpg_bound_request* req, int64_t n,
                           double* out) {
  if (!req) return null_arg("req");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto e = to_experiment(*req);
    e.params.validate();
    *out = htpg::bound_rhs(e.params, n);
  });
}

htpg_status htpg_check_bound(const htpg_bound_request* req,
                             htpg_bound_report* out) {
  if (!req) return null_arg("req");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto r = htpg::run_bound_experiment(to_experiment(*req));
    out->lhs = r.lhs;
    out->rhs = r.rhs;
    out->lhs_stderr = r.lhs_stderr;
    out->seeds = r.seeds;
    out->holds = r.holds ? 1 : 0;
  });
}

htpg_status htpg_first_exit_run(const htpg_config* cfg, unsigned threads,
                                htpg_first_exit_report* out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto res = htpg::run_first_exit(cfg->cfg, threads);
    std::memset(out, 0, sizeof *out);
    for (int i = 0; i < 2; ++i) {
      const auto& f = res.summary.families[static_cast<size_t>(i)];
      std::strncpy(out->family[i], f.name.c_str(), sizeof out->family[i] - 1);
      out->median_exit[i] = f.median_exit;
    }
    out->sign_test_p = res.summary.sign_test_p;
    out->wins = res.summary.wins;
    out->losses = res.summary.losses;
    out->ties = res.summary.ties;
  });
}

}  // extern "C"
