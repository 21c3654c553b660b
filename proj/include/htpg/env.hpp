#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "htpg/policy.hpp"
#include "htpg/random.hpp"

namespace htpg {

enum class EnvKind { TrappedCar, MountainCar };

// Constants for both built-in environments. Defaults come from the named
// factories; every field can be overridden from an experiment config.
struct EnvSpec {
  EnvKind kind = EnvKind::TrappedCar;

  double state_low = -4.0;
  double state_high = 3.709;
  double velocity_low = -0.5;
  double velocity_high = 0.5;
  double action_low = -20.0;
  double action_high = 20.0;
  double init_low = 1.15;
  double init_high = 2.0;
  double gamma = 0.97;
  double reward_bound = 100.0;
  std::int64_t max_steps = 500;

  // v' = v + force * a - gravity * cos(3 x)
  double force = 0.001;
  double gravity = 0.0025;

  double goal_position = 3.6;
  double goal_reward = 100.0;
  // Misleading region [false_low, false_high] paying false_reward per step.
  double false_low = -4.0;
  double false_high = -3.0;
  double false_reward = 0.1;
  // Reset position when starting at the false goal.
  double false_start = -3.5;
  // A trajectory has left the false-goal basin once position >= this.
  double exit_position = 3.6;
  // Per-step reward while the goal is not reached (mountain car).
  double step_reward = 0.0;

  static EnvSpec trapped_car();
  static EnvSpec mountain_car();

  void validate() const;
};

struct EnvState {
  double position = 0.0;
  double velocity = 0.0;
  std::int64_t step_count = 0;
  bool terminal = false;
};

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  bool done = false;
};

EnvState trapped_car_reset(const EnvSpec& spec, Stream& rng,
                           bool start_at_false_goal);
StepResult trapped_car_step(const EnvSpec& spec, const EnvState& st, double a);

EnvState mountain_car_reset(const EnvSpec& spec, Stream& rng);
StepResult mountain_car_step(const EnvSpec& spec, const EnvState& st, double a);

// Common episodic interface. Implementations are immutable; all episode
// state lives in EnvState values.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual EnvState reset(Stream& rng) const = 0;
  virtual StepResult step(const EnvState& st, double a) const = 0;

  // Defaults to [position, velocity, 1].
  virtual FeatureVector features(const EnvState& st) const;
  // True once the trajectory has left the false-goal basin.
  virtual bool exited(const EnvState& st) const;

  double clamp_action(double a) const;
};

class TrappedCar final : public Environment {
 public:
  explicit TrappedCar(EnvSpec spec = EnvSpec::trapped_car(),
                      bool start_at_false_goal = false);
  const EnvSpec& spec() const override { return spec_; }
  EnvState reset(Stream& rng) const override;
  StepResult step(const EnvState& st, double a) const override;

 private:
  EnvSpec spec_;
  bool start_at_false_goal_;
};

class MountainCar final : public Environment {
 public:
  explicit MountainCar(EnvSpec spec = EnvSpec::mountain_car());
  const EnvSpec& spec() const override { return spec_; }
  EnvState reset(Stream& rng) const override;
  StepResult step(const EnvState& st, double a) const override;

 private:
  EnvSpec spec_;
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec,
                                              bool start_at_false_goal = false);

struct Transition {
  EnvState state;
  FeatureVector features;
  double action = 0.0;   // as sampled from the policy
  double applied = 0.0;  // after clamping to the action bounds
  double reward = 0.0;
};

struct Trajectory {
  std::vector<Transition> steps;
  EnvState final_state;
  bool terminal = false;

  double total_return() const;
  std::size_t size() const { return steps.size(); }
};

// Draws an action given features. Lets tests substitute deterministic
// policies for PolicyParams.
using ActionFn = std::function<double(const FeatureVector&, Stream&)>;

ActionFn policy_actions(const PolicyParams& p);

Trajectory rollout(const Environment& env, const ActionFn& act, Stream& rng,
                   std::int64_t horizon);
Trajectory rollout(const Environment& env, const PolicyParams& p, Stream& rng,
                   std::int64_t horizon);
// Same, from a given start state instead of env.reset().
Trajectory rollout_from(const Environment& env, const EnvState& start,
                        const ActionFn& act, Stream& rng,
                        std::int64_t horizon);

}  // namespace htpg
