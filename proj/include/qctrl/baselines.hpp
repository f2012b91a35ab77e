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
#include <vector>

#include <Eigen/Dense>

#include "qctrl/env.hpp"
#include "qctrl/lindblad.hpp"
#include "qctrl/protocol.hpp"

namespace qctrl {

// ---------------------------------------------------------------------------
// Greedy control

/// Rate of change of the target population split into the dissipative part
/// `c` = Tr(L_diss(rho) |t><t|) and the per-unit-coupling part
/// `d` = -i Tr(rho [|t><t|, H_c]), so that dF/dt = c + gamma(t) d.
struct LyapunovIndicators {
  double c = 0.0;
  double d = 0.0;
};

/// `target_level` 0 means the top level n.
LyapunovIndicators lyapunov_indicators(const DensityMatrix& rho, const LadderModel& model,
                                       int target_level = 0);

enum class GreedyMode {
  /// Propagate both actions one slice and keep the higher fidelity (ties -> 0).
  kLookahead,
  /// Four-branch sign table on (c, d); see lyapunov_indicators.
  kLyapunov,
};

int greedy_step(const DensityMatrix& rho, const EnvConfig& config,
                const BangBangPropagators& props, GreedyMode mode = GreedyMode::kLookahead);

struct GreedyResult {
  Protocol protocol;
  Trajectory trajectory;
};

GreedyResult run_greedy(const EnvConfig& config, GreedyMode mode = GreedyMode::kLookahead);

// ---------------------------------------------------------------------------
// Exhaustive search

inline constexpr int kDefaultExhaustiveMaxSteps = 16;

struct SearchResult {
  Protocol protocol;
  double fidelity = 0.0;
};

/// Scores all 2^N binary protocols along a depth-first tree that shares
/// prefixes; ties go to the lexicographically smallest action sequence.
/// Refuses N > max_steps with DomainError.
SearchResult exhaustive_search(const EnvConfig& config,
                               int max_steps = kDefaultExhaustiveMaxSteps);

// ---------------------------------------------------------------------------
// GRAPE

enum class GradientMode { kAdjoint, kFiniteDifference };

struct GrapeConfig {
  int max_iterations = 400;
  /// Trial step is step_size * gamma_max / max|grad|, halved until F improves.
  double step_size = 0.5;
  /// Uniform random starts, on top of the all-on and all-off starts.
  int restarts = 8;
  GradientMode gradient_mode = GradientMode::kAdjoint;
  /// Stop once F improved by less than this over the last `patience` iterations.
  double convergence_tol = 1e-9;
  int patience = 25;
  double finite_difference_step = 1e-6;
  int max_threads = 0;

  void validate() const;
};

/// Terminal fidelity of a continuous protocol and its gradient with respect
/// to every slice amplitude. Closed models are propagated as pure states in
/// Hilbert space; dissipative ones with superoperators and exact Frechet
/// derivatives of each slice exponential.
class GrapeObjective {
 public:
  explicit GrapeObjective(EnvConfig config);

  const EnvConfig& config() const { return config_; }
  double fidelity(const std::vector<double>& amplitudes) const;
  /// Adjoint method: forward states, backward costates from the target
  /// projector, combined with d exp(L dt)/d gamma per slice.
  double gradient(const std::vector<double>& amplitudes, std::vector<double>& grad) const;
  /// Central differences; one-sided where a step would leave [0, gamma_max].
  double finite_difference_gradient(const std::vector<double>& amplitudes, double step,
                                    std::vector<double>& grad) const;

 private:
  EnvConfig config_;
  bool closed_;
  Eigen::MatrixXd drift_;     // real symmetric H0
  Eigen::MatrixXd coupling_;  // real symmetric H_c
  ComplexMatrix lindblad_off_;
  ComplexMatrix lindblad_coupling_;
};

/// GRAPE for every slice amplitude, `grad` receives dF/dgamma_i.
std::vector<double> grape_gradient(const Protocol& protocol, const EnvConfig& config,
                                   GradientMode mode = GradientMode::kAdjoint);

struct GrapeResult {
  Protocol protocol;
  double fidelity = 0.0;
  int iterations = 0;  // summed over all starts
};

/// Projected gradient ascent from the all-off, all-on and `restarts` random
/// starts plus any caller-provided warm starts; returns the best.
GrapeResult grape_optimize(const EnvConfig& config, const GrapeConfig& grape, std::uint64_t seed,
                           const std::vector<Protocol>& warm_starts = {});

/// Single ascent run from `start`, exposed for tests.
GrapeResult grape_ascend(const GrapeObjective& objective, const GrapeConfig& grape,
                         std::vector<double> start);

}  // namespace qctrl
