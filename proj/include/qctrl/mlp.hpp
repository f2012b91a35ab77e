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
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qctrl {

/// Fully connected network: `depth` ReLU layers of `width` units followed by
/// a linear head. All weights and biases live in one flat vector so the
/// optimizer and checkpoints can treat them uniformly. Per layer the layout
/// is W (out x in, column-major) followed by b (out).
class Mlp {
 public:
  Mlp() = default;
  Mlp(int inputs, int width, int depth, int outputs);

  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  int layers() const { return static_cast<int>(sizes_.size()) - 1; }
  const std::vector<int>& sizes() const { return sizes_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  /// He-uniform hidden layers, biases zero, head scaled by `head_scale`.
  void initialize(std::mt19937_64& rng, double head_scale = 0.01);
  void zero_output_head();

  /// Activations of every layer for a batch (one column per sample).
  struct Tape {
    std::vector<Eigen::MatrixXd> activations;  // layers() + 1 entries
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;
  /// Gradient of sum_j <grad_out[:, j], f(x_j)> with respect to every
  /// parameter, in the flat layout.
  Eigen::VectorXd backward(const Tape& tape, const Eigen::MatrixXd& grad_out) const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of W for each layer
  Eigen::VectorXd params_;
};

}  // namespace qctrl
