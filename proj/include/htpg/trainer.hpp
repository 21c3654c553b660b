#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "htpg/env.hpp"
#include "htpg/policy.hpp"

namespace htpg {

// alpha_k = k^{-b}
struct PowerDecay {
  double b = 0.5;
};
// Log-linear interpolation from `start` (k = 1) to `end` (k = count).
struct LinearRange {
  double start = 0.005;
  double end = 5e-9;
  std::int64_t count = 1000;
};
struct ConstantStep {
  double alpha = 0.01;
};
using StepRule = std::variant<PowerDecay, LinearRange, ConstantStep>;

// theta + alpha_k * g
struct PlainAscent {};
// theta + (1/alpha_k - L)^{-1} * g
struct LipschitzAware {
  double l1j = 1.0;
};
using UpdateRule = std::variant<PlainAscent, LipschitzAware>;

double step_size(const StepRule& rule, std::int64_t k);
// Largest alpha_k the schedule ever produces.
double max_step_size(const StepRule& rule);
void validate_step_rule(const StepRule& rule);
// Throws ScheduleError when a Lipschitz-aware rule meets a step size with
// 1/alpha <= L.
void validate_schedule(const StepRule& step, const UpdateRule& update);

std::vector<double> apply_update(std::span<const double> theta,
                                 std::span<const double> grad,
                                 const UpdateRule& rule, double alpha_k,
                                 std::int64_t k = 0);

enum class QMode {
  // One Q estimate per episode, read off the start of the simulated
  // trajectory, used for every transition.
  Shared,
  // An independent estimate rolled out from every visited (s_t, a_t).
  Fresh,
};

struct TrainConfig {
  double gamma = 0.97;
  double epsilon_clip = 0.2;
  ClipMode clip_mode = ClipMode::Literal;
  StepRule step_rule = LinearRange{};
  UpdateRule update_rule = PlainAscent{};
  QMode q_mode = QMode::Shared;
  std::int64_t episodes = 1000;
  std::uint64_t seed = 1;
  PolicyParams policy_init;

  void validate() const;
};

struct RunMetrics {
  std::vector<double> returns;
  std::vector<double> moving_avg_100;
  // ||theta_after - theta_before|| over each episode.
  std::vector<double> update_norms;
  // Cumulative parameter updates at the end of each episode.
  std::vector<std::int64_t> update_counts;
  std::vector<bool> reached_goal;
  std::optional<std::int64_t> first_exit_episode;
  std::int64_t wall_updates = 0;

  // Set when the run stopped on non-finite parameters.
  std::optional<std::string> divergence;
  std::optional<std::int64_t> diverged_episode;

  std::size_t episodes() const { return returns.size(); }
};

struct TrainOutcome {
  RunMetrics metrics;
  PolicyParams policy;
};

// Exploratory policy search. Never throws on divergence; the partial
// metrics carry the diagnostic instead.
TrainOutcome run_training(const TrainConfig& config, const Environment& env);

// As run_training but throws DivergenceError when the run diverged.
RunMetrics train(const TrainConfig& config, const Environment& env);

}  // namespace htpg
