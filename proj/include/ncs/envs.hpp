#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ncs/neuro.hpp"

namespace ncs {

// Episodic environment with discrete actions. reset() must be called before
// step(); stepping a finished episode is a contract violation.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int observation_size() const = 0;
  virtual int action_count() const = 0;
  virtual int max_steps() const = 0;

  virtual std::vector<double> reset(std::uint64_t seed) = 0;

  struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
  };
  virtual StepResult step(int action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

// Deterministic corridor with a deceptive near reward: states 0..N-1, start
// at state 1, one-hot observations. State 0 pays `distractor_reward` and
// terminates; state N-1 pays 1.0 and terminates; anything else pays 0.
std::unique_ptr<Environment> sparse_chain(int n, int horizon, double distractor_reward = 0.01);

struct CartPoleConfig {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_half_length = 0.5;
  double force = 10.0;
  double timestep = 0.02;
  double angle_limit_rad = 12.0 * 3.14159265358979323846 / 180.0;
  double position_limit = 2.4;
  int max_steps = 500;
};

// Classic inverted-pendulum balance task, Euler-integrated. Observation is
// (position, velocity, angle, angular velocity); actions push left/right;
// reward +1 per non-failed step.
std::unique_ptr<Environment> cartpole(const CartPoleConfig& config = {});

// Mean episodic return over `episodes` episodes with per-episode seeds derived
// from (seed, episode index). One call = one objective evaluation.
double evaluate_policy(std::span<const double> genome, const MlpArchitecture& arch,
                       Environment& env, int episodes, std::uint64_t seed);

}  // namespace ncs
