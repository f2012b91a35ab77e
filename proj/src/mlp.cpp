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

#include "qctrl/mlp.hpp"

#include <cmath>

#include "qctrl/errors.hpp"

namespace qctrl {

Mlp::Mlp(int inputs, int width, int depth, int outputs) {
  if (inputs < 1 || outputs < 1 || depth < 0 || (depth > 0 && width < 1))
    throw InvalidDimension("Mlp: invalid layer sizes");
  sizes_.push_back(inputs);
  for (int i = 0; i < depth; ++i) sizes_.push_back(width);
  sizes_.push_back(outputs);
  Eigen::Index total = 0;
  for (int l = 0; l < layers(); ++l) {
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l] + sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(total);
}

Eigen::Map<Eigen::MatrixXd> Mlp::weight(int l) {
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}
Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int l) const {
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}
Eigen::Map<Eigen::VectorXd> Mlp::bias(int l) {
  return {params_.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
}
Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  return {params_.data() + offsets_[l] + Eigen::Index(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
}

void Mlp::initialize(std::mt19937_64& rng, double head_scale) {
  for (int l = 0; l < layers(); ++l) {
    const double limit = std::sqrt(6.0 / sizes_[l]);
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto w = weight(l);
    const double scale = (l + 1 == layers()) ? head_scale : 1.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * dist(rng);
    bias(l).setZero();
  }
}

void Mlp::zero_output_head() {
  weight(layers() - 1).setZero();
  bias(layers() - 1).setZero();
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Tape tape;
  return forward(x, tape);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  if (x.rows() != inputs()) throw InvalidDimension("Mlp::forward: input size mismatch");
  tape.activations.clear();
  tape.activations.reserve(layers() + 1);
  tape.activations.push_back(x);
  for (int l = 0; l < layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * tape.activations.back();
    z.colwise() += bias(l);
    if (l + 1 < layers()) z = z.cwiseMax(0.0);
    tape.activations.push_back(std::move(z));
  }
  return tape.activations.back();
}

Eigen::VectorXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_out) const {
  if (static_cast<int>(tape.activations.size()) != layers() + 1)
    throw InvalidDimension("Mlp::backward: tape does not match network");
  if (grad_out.rows() != outputs() || grad_out.cols() != tape.activations.back().cols())
    throw InvalidDimension("Mlp::backward: gradient shape mismatch");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd delta = grad_out;
  for (int l = layers() - 1; l >= 0; --l) {
    const auto& input = tape.activations[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + gw.size(), sizes_[l + 1]);
    gw.noalias() = delta * input.transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd prev = weight(l).transpose() * delta;
      // ReLU mask from the stored post-activation of layer l-1.
      delta = (input.array() > 0.0).select(prev, 0.0);
    }
  }
  return grad;
}

}  // namespace qctrl
