#include "htpg/env.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "htpg/error.hpp"

namespace htpg {

EnvSpec EnvSpec::trapped_car() { return EnvSpec{}; }

EnvSpec EnvSpec::mountain_car() {
  EnvSpec s;
  s.kind = EnvKind::MountainCar;
  s.state_low = -1.2;
  s.state_high = 0.6;
  s.velocity_low = -0.07;
  s.velocity_high = 0.07;
  s.action_low = -1.0;
  s.action_high = 1.0;
  s.init_low = -0.6;
  s.init_high = -0.4;
  s.reward_bound = 1.0;
  s.max_steps = 999;
  s.force = 0.0015;
  s.goal_position = 0.45;
  s.goal_reward = 0.0;
  s.false_low = 0.0;
  s.false_high = -1.0;  // empty region
  s.false_reward = 0.0;
  s.false_start = -0.5;
  s.exit_position = 0.45;
  s.step_reward = -1.0;
  return s;
}

void EnvSpec::validate() const {
  if (!(state_low < state_high)) throw ParameterError("state_low >= state_high");
  if (!(velocity_low < velocity_high)) {
    throw ParameterError("velocity_low >= velocity_high");
  }
  if (!(action_low < action_high)) {
    throw ParameterError("action_low >= action_high");
  }
  if (!(init_low <= init_high && init_low >= state_low &&
        init_high <= state_high)) {
    throw ParameterError("initial interval must lie inside the state interval");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  if (!(reward_bound > 0.0)) throw ParameterError("reward_bound must be positive");
  if (max_steps < 1) throw ParameterError("max_steps must be positive");
  const double worst = std::max({std::abs(goal_reward), std::abs(false_reward),
                                 std::abs(step_reward),
                                 std::abs(false_reward + step_reward)});
  if (worst > reward_bound) {
    throw ParameterError("reward constants exceed reward_bound");
  }
  if (false_start < state_low || false_start > state_high) {
    throw ParameterError("false_start outside the state interval");
  }
}

namespace {

// Shared mountain-car family transition: semi-implicit Euler with an
// inelastic left wall.
EnvState advance(const EnvSpec& spec, const EnvState& st, double a) {
  if (st.terminal) throw UsageError("cannot step a terminal state");
  const double act = std::clamp(a, spec.action_low, spec.action_high);
  EnvState next = st;
  next.velocity = std::clamp(
      st.velocity + spec.force * act - spec.gravity * std::cos(3.0 * st.position),
      spec.velocity_low, spec.velocity_high);
  next.position = std::clamp(st.position + next.velocity, spec.state_low,
                             spec.state_high);
  if (next.position == spec.state_low && next.velocity < 0.0) {
    next.velocity = 0.0;
  }
  next.step_count = st.step_count + 1;
  return next;
}

double uniform_in(Stream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

}  // namespace

EnvState trapped_car_reset(const EnvSpec& spec, Stream& rng,
                           bool start_at_false_goal) {
  EnvState st;
  st.position = start_at_false_goal
                    ? spec.false_start
                    : uniform_in(rng, spec.init_low, spec.init_high);
  return st;
}

StepResult trapped_car_step(const EnvSpec& spec, const EnvState& st,
                            double a) {
  StepResult r;
  r.next_state = advance(spec, st, a);
  const double x = r.next_state.position;
  if (x >= spec.goal_position) {
    r.reward = spec.goal_reward;
    r.next_state.terminal = true;
  } else if (x >= spec.false_low && x <= spec.false_high) {
    r.reward = spec.false_reward;
  }
  r.reward += r.next_state.terminal ? 0.0 : spec.step_reward;
  r.done = r.next_state.terminal || r.next_state.step_count >= spec.max_steps;
  return r;
}

EnvState mountain_car_reset(const EnvSpec& spec, Stream& rng) {
  EnvState st;
  st.position = uniform_in(rng, spec.init_low, spec.init_high);
  return st;
}

StepResult mountain_car_step(const EnvSpec& spec, const EnvState& st,
                             double a) {
  StepResult r;
  r.next_state = advance(spec, st, a);
  if (r.next_state.position >= spec.goal_position) {
    r.next_state.terminal = true;
    r.reward = spec.goal_reward;
  } else {
    r.reward = spec.step_reward;
  }
  r.done = r.next_state.terminal || r.next_state.step_count >= spec.max_steps;
  return r;
}

FeatureVector Environment::features(const EnvState& st) const {
  const std::array<double, 2> raw{st.position, st.velocity};
  return FeatureVector::affine(raw);
}

bool Environment::exited(const EnvState& st) const {
  return st.position >= spec().exit_position;
}

double Environment::clamp_action(double a) const {
  return std::clamp(a, spec().action_low, spec().action_high);
}

TrappedCar::TrappedCar(EnvSpec spec, bool start_at_false_goal)
    : spec_(std::move(spec)), start_at_false_goal_(start_at_false_goal) {
  spec_.validate();
}

EnvState TrappedCar::reset(Stream& rng) const {
  return trapped_car_reset(spec_, rng, start_at_false_goal_);
}

StepResult TrappedCar::step(const EnvState& st, double a) const {
  return trapped_car_step(spec_, st, a);
}

MountainCar::MountainCar(EnvSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

EnvState MountainCar::reset(Stream& rng) const {
  return mountain_car_reset(spec_, rng);
}

StepResult MountainCar::step(const EnvState& st, double a) const {
  return mountain_car_step(spec_, st, a);
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec,
                                              bool start_at_false_goal) {
  switch (spec.kind) {
    case EnvKind::TrappedCar:
      return std::make_unique<TrappedCar>(spec, start_at_false_goal);
    case EnvKind::MountainCar:
      return std::make_unique<MountainCar>(spec);
  }
  throw ParameterError("unknown environment kind");
}

double Trajectory::total_return() const {
  double r = 0.0;
  for (const auto& t : steps) r += t.reward;
  return r;
}

ActionFn policy_actions(const PolicyParams& p) {
  return [&p](const FeatureVector& s, Stream& rng) {
    return sample_action(p, s, rng);
  };
}

Trajectory rollout_from(const Environment& env, const EnvState& start,
                        const ActionFn& act, Stream& rng,
                        std::int64_t horizon) {
  if (horizon < 1) throw ParameterError("rollout horizon must be >= 1");
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(
      std::min<std::int64_t>(horizon, env.spec().max_steps)));
  EnvState st = start;
  for (std::int64_t t = 0; t < horizon; ++t) {
    Transition tr;
    tr.state = st;
    tr.features = env.features(st);
    tr.action = act(tr.features, rng);
    tr.applied = env.clamp_action(tr.action);
    const StepResult r = env.step(st, tr.applied);
    tr.reward = r.reward;
    traj.steps.push_back(std::move(tr));
    st = r.next_state;
    if (r.done) break;
  }
  traj.final_state = st;
  traj.terminal = st.terminal;
  return traj;
}

Trajectory rollout(const Environment& env, const ActionFn& act, Stream& rng,
                   std::int64_t horizon) {
  if (horizon < 1) throw ParameterError("rollout horizon must be >= 1");
  const EnvState start = env.reset(rng);
  return rollout_from(env, start, act, rng, horizon);
}

Trajectory rollout(const Environment& env, const PolicyParams& p, Stream& rng,
                   std::int64_t horizon) {
  p.validate();
  return rollout(env, policy_actions(p), rng, horizon);
}

}  // namespace htpg
