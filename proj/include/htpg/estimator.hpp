#pragma once

#include <cstdint>

#include "htpg/env.hpp"

namespace htpg {

struct QEstimate {
  double value = 0.0;
  std::int64_t horizon_drawn = 0;
};

// T with P(T = t) = (1 - sqrt(gamma)) * sqrt(gamma)^t, t = 0, 1, ...
std::int64_t draw_horizon(double gamma, Stream& rng);

// Unbiased Monte-Carlo estimate sum_{t=0}^{T'} gamma^{t/2} R(s_t, a_t) with
// s_0 = s0, a_0 = a0 and later actions drawn from `act`. The rollout stops
// early at a terminal state and never runs longer than max_steps
// transitions; s0's own step counter is ignored.
QEstimate estimate_q(const Environment& env, const ActionFn& act,
                     const EnvState& s0, double a0, double gamma, Stream& rng);
QEstimate estimate_q(const Environment& env, const PolicyParams& p,
                     const EnvState& s0, double a0, double gamma, Stream& rng);

// The same weighted sum read off an already simulated trajectory:
// sum_{t=0}^{min(horizon, len-1)} gamma^{t/2} r_t.
double discounted_prefix(const Trajectory& traj, double gamma,
                         std::int64_t horizon);

// U_R / (1 - sqrt(gamma)).
double q_estimate_bound(double reward_bound, double gamma);

}  // namespace htpg
