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
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qctrl/lindblad.hpp"
#include "qctrl/protocol.hpp"

namespace qctrl {

/// Fixed-horizon episode: `steps` slices of length `dt`, starting in
/// |initial_level> and scored on |target_level>. Zero levels mean the
/// defaults (initial 1, target n).
struct EnvConfig {
  LadderModel model;
  int steps = 1;
  double dt = 0.5;
  int target_level = 0;
  int initial_level = 0;

  int target() const { return target_level > 0 ? target_level : model.levels(); }
  int initial() const { return initial_level > 0 ? initial_level : 1; }
  double total_time() const { return steps * dt; }
  void validate() const;
};

/// Real/imaginary parts of every entry of rho, row-major.
using Observation = Eigen::VectorXd;

Observation encode_state(const DensityMatrix& rho);
/// Inverse of encode_state; does not validate.
DensityMatrix decode_state(std::span<const double> values);

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  double fidelity = 0.0;
};

/// Bang-bang environment. Owns its state; shares immutable propagators.
class ControlEnv {
 public:
  explicit ControlEnv(EnvConfig config);
  ControlEnv(EnvConfig config, std::shared_ptr<const BangBangPropagators> propagators);

  /// Back to |initial><initial|. Evolution is deterministic; the seed is only
  /// kept for reproducibility bookkeeping.
  Observation reset(std::uint64_t seed = 0);
  StepResult step(int action);

  const DensityMatrix& state() const { return rho_; }
  double fidelity() const;
  int steps_taken() const { return step_; }
  bool done() const { return step_ >= config_.steps; }
  std::uint64_t seed() const { return seed_; }
  const EnvConfig& config() const { return config_; }
  const std::shared_ptr<const BangBangPropagators>& propagators() const { return props_; }

 private:
  EnvConfig config_;
  std::shared_ptr<const BangBangPropagators> props_;
  DensityMatrix rho_;
  int step_ = 0;
  std::uint64_t seed_ = 0;
};

struct Trajectory {
  std::vector<double> fidelity;  // steps + 1 entries, index 0 is the start
  double final_fidelity = 0.0;
};

/// Plays a full protocol. Binary protocols reuse the two bang-bang
/// propagators; continuous ones build one propagator per distinct amplitude.
Trajectory run_protocol(const EnvConfig& config, const Protocol& protocol);
Trajectory run_actions(const EnvConfig& config, const BangBangPropagators& props,
                       std::span<const int> actions);

}  // namespace qctrl
