// Copyright 2026 The qctrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qctrl/env.hpp"
#include "qctrl/mlp.hpp"
#include "qctrl/protocol.hpp"

namespace qctrl::dppo {

// ---------------------------------------------------------------------------
// Optimizer

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(Eigen::Index size)
      : first_moment(Eigen::VectorXd::Zero(size)), second_moment(Eigen::VectorXd::Zero(size)) {}
};

/// One bias-corrected Adam step, in place.
void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& gradient, AdamState& state,
                 const AdamConfig& config);

// ---------------------------------------------------------------------------
// Networks

/// Disjoint actor and critic networks of identical trunk shape. The actor
/// emits two logits: index 0 = coupling off, index 1 = coupling on.
struct ActorCriticParams {
  Mlp actor;
  Mlp critic;
  AdamState actor_opt;
  AdamState critic_opt;

  static ActorCriticParams create(int inputs, int width, int depth, std::uint64_t seed,
                                  double head_scale = 0.01);
};

struct ActionProbs {
  double on;
  double off;
};

ActionProbs policy_forward(const ActorCriticParams& params, const Observation& obs);
double log_prob(const ActorCriticParams& params, const Observation& obs, int action);
double value_forward(const ActorCriticParams& params, const Observation& obs);

/// Column-wise log-softmax of a 2 x B logit matrix.
Eigen::MatrixXd log_softmax2(const Eigen::MatrixXd& logits);

// ---------------------------------------------------------------------------
// Rollouts

struct Transition {
  Observation observation;
  int action = 0;
  double reward = 0.0;
  double log_prob_old = 0.0;
  double value_estimate = 0.0;
};

/// Full episodes from all workers, stored episode-major. `returns`,
/// `advantages` and `value_targets` are filled by compute_returns_advantages.
struct RolloutBatch {
  std::vector<Transition> transitions;
  std::vector<std::size_t> episode_starts;
  std::vector<std::vector<int>> episode_actions;
  std::vector<double> final_fidelities;
  Eigen::MatrixXd observations;  // inputs x transitions
  Eigen::VectorXd returns;
  Eigen::VectorXd advantages;
  Eigen::VectorXd value_targets;

  std::size_t size() const { return transitions.size(); }
  std::size_t episodes() const { return episode_starts.size(); }
  std::size_t episode_end(std::size_t e) const {
    return e + 1 < episode_starts.size() ? episode_starts[e + 1] : transitions.size();
  }
};

struct RolloutOptions {
  int workers = 12;
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  int max_threads = 0;
};

/// One episode per worker, sampling actions from the categorical policy with
/// a private random stream per (seed, iteration, worker). The snapshot is
/// only read. A failing worker fails the whole batch.
RolloutBatch collect_rollouts(const ActorCriticParams& snapshot, const EnvConfig& config,
                              const std::shared_ptr<const BangBangPropagators>& propagators,
                              const RolloutOptions& options);

/// Monte-Carlo discounted returns per episode, A_t = G_t - V(s_t) with the
/// values recorded at collection time, and value targets A_t + V(s_t).
void compute_returns_advantages(RolloutBatch& batch, double discount,
                                bool normalize_advantages = false);

// ---------------------------------------------------------------------------
// Losses

double clip(double x, double lo, double hi);

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

/// Negated mean clipped surrogate; gradient over the actor parameters.
LossAndGradient ppo_surrogate_loss(const ActorCriticParams& params, const RolloutBatch& batch,
                                   double clip_eps);
/// Mean squared error to the value targets; gradient over the critic.
LossAndGradient critic_loss(const ActorCriticParams& params, const RolloutBatch& batch);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  int workers = 12;
  double clip_eps = 0.2;
  double learning_rate = 1e-4;
  double discount = 0.85;
  int update_epochs = 15;
  int iterations = 100;
  int hidden_width = 128;
  int hidden_depth = 4;
  std::uint64_t seed = 0;
  bool normalize_advantages = false;
  double head_scale = 0.01;
  int max_threads = 0;
  bool record_wall_time = true;

  void validate() const;
};

struct CurvePoint {
  int iteration = 0;
  std::int64_t episodes = 0;
  double mean_fidelity = 0.0;
  double best_fidelity = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  Protocol best_protocol;
  double best_fidelity = 0.0;
  std::int64_t episodes_to_best = 0;
  /// Argmax rollout of the policy after the last update.
  Protocol final_protocol;
  double final_fidelity = 0.0;
  std::int64_t episodes = 0;
  std::vector<CurvePoint> curve;
  ActorCriticParams params;
};

using IterationCallback = std::function<void(const CurvePoint&, const ActorCriticParams&)>;

/// Synchronous distributed PPO: collect W episodes, estimate advantages,
/// then M epochs of full-batch clipped actor updates and critic regression.
/// Throws NumericalError if a loss becomes non-finite.
TrainResult train(const TrainConfig& config, const EnvConfig& env_config,
                  const IterationCallback& on_iteration = {});

/// CSV with header iteration,episodes_so_far,mean_fidelity,best_fidelity,wall_seconds.
void write_learning_curve(std::ostream& out, const std::vector<CurvePoint>& curve);

// ---------------------------------------------------------------------------
// Checkpoints: one line of JSON header, then every parameter and optimizer
// moment as little-endian float64.

struct CheckpointInfo {
  std::uint64_t seed = 0;
  int iteration = 0;
};

void save_checkpoint(const std::string& path, const ActorCriticParams& params,
                     const CheckpointInfo& info);
ActorCriticParams load_checkpoint(const std::string& path, CheckpointInfo* info = nullptr);

}  // namespace qctrl::dppo
