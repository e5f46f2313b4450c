#include "ncs/envs.hpp"

#include <cmath>

#include "ncs/errors.hpp"
#include "ncs/rng.hpp"

namespace ncs {
namespace {

class SparseChain final : public Environment {
 public:
  SparseChain(int n, int horizon, double distractor)
      : n_(n), horizon_(horizon), distractor_(distractor) {
    require(n >= 3, "sparse_chain: N must be at least 3");
    require(horizon >= n, "sparse_chain: horizon must be at least N");
  }

  int observation_size() const override { return n_; }
  int action_count() const override { return 2; }
  int max_steps() const override { return horizon_; }

  std::vector<double> reset(std::uint64_t) override {
    state_ = 1;
    steps_ = 0;
    done_ = false;
    return observe();
  }

  StepResult step(int action) override {
    require(!done_, "sparse_chain: step after episode end");
    require(action == 0 || action == 1, "sparse_chain: invalid action");
    state_ += action == 1 ? 1 : -1;
    state_ = std::max(0, std::min(state_, n_ - 1));
    ++steps_;

    StepResult r;
    if (state_ == 0) {
      r.reward = distractor_;
      done_ = true;
    } else if (state_ == n_ - 1) {
      r.reward = 1.0;
      done_ = true;
    } else if (steps_ >= horizon_) {
      done_ = true;
    }
    r.done = done_;
    r.observation = observe();
    return r;
  }

 private:
  std::vector<double> observe() const {
    std::vector<double> obs(static_cast<std::size_t>(n_), 0.0);
    obs[static_cast<std::size_t>(state_)] = 1.0;
    return obs;
  }

  int n_;
  int horizon_;
  double distractor_;
  int state_ = 1;
  int steps_ = 0;
  bool done_ = true;
};

class CartPole final : public Environment {
 public:
  explicit CartPole(const CartPoleConfig& cfg) : cfg_(cfg) {}

  int observation_size() const override { return 4; }
  int action_count() const override { return 2; }
  int max_steps() const override { return cfg_.max_steps; }

  std::vector<double> reset(std::uint64_t seed) override {
    const std::uint64_t key = rng::derive(seed, rng::Stream::kEnvReset);
    for (int k = 0; k < 4; ++k) {
      state_[k] = -0.05 + 0.1 * rng::uniform_at(key, static_cast<std::uint64_t>(k));
    }
    steps_ = 0;
    done_ = false;
    return observe();
  }

  StepResult step(int action) override {
    require(!done_, "cartpole: step after episode end");
    require(action == 0 || action == 1, "cartpole: invalid action");

    const double force = action == 1 ? cfg_.force : -cfg_.force;
    const double total_mass = cfg_.cart_mass + cfg_.pole_mass;
    const double pole_mass_length = cfg_.pole_mass * cfg_.pole_half_length;
    const double theta = state_[2];
    const double theta_dot = state_[3];
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);

    const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
    const double theta_acc =
        (cfg_.gravity * sin_t - cos_t * temp) /
        (cfg_.pole_half_length * (4.0 / 3.0 - cfg_.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

    state_[0] += cfg_.timestep * state_[1];
    state_[1] += cfg_.timestep * x_acc;
    state_[2] += cfg_.timestep * theta_dot;
    state_[3] += cfg_.timestep * theta_acc;
    ++steps_;

    const bool failed = std::abs(state_[0]) > cfg_.position_limit ||
                        std::abs(state_[2]) > cfg_.angle_limit_rad;
    StepResult r;
    r.reward = failed ? 0.0 : 1.0;
    done_ = failed || steps_ >= cfg_.max_steps;
    r.done = done_;
    r.observation = observe();
    return r;
  }

 private:
  std::vector<double> observe() const { return {state_[0], state_[1], state_[2], state_[3]}; }

  CartPoleConfig cfg_;
  double state_[4] = {0, 0, 0, 0};
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace

std::unique_ptr<Environment> sparse_chain(int n, int horizon, double distractor_reward) {
  return std::make_unique<SparseChain>(n, horizon, distractor_reward);
}

std::unique_ptr<Environment> cartpole(const CartPoleConfig& config) {
  return std::make_unique<CartPole>(config);
}

double evaluate_policy(std::span<const double> genome, const MlpArchitecture& arch,
                       Environment& env, int episodes, std::uint64_t seed) {
  require(episodes >= 1, "evaluate_policy: episodes must be positive");
  require(arch.input_size() == env.observation_size() &&
              arch.output_size() == env.action_count(),
          "evaluate_policy: architecture does not match environment");
  const MlpPolicy policy(genome, arch);

  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t episode_seed =
        rng::derive(seed, rng::Stream::kEpisode, static_cast<std::uint64_t>(e));
    std::vector<double> obs = env.reset(episode_seed);
    double ep_return = 0.0;
    for (int t = 0; t < env.max_steps(); ++t) {
      const Environment::StepResult r = env.step(policy.act(obs));
      ep_return += r.reward;
      if (r.done) break;
      obs = r.observation;
    }
    total += ep_return;
  }
  return total / static_cast<double>(episodes);
}

}  // namespace ncs
