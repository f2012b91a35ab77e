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

#include "qctrl/env.hpp"

#include <cmath>
#include <map>

#include "qctrl/errors.hpp"

namespace qctrl {

void EnvConfig::validate() const {
  model.validate();
  if (steps < 1) throw DomainError("env config: steps must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("env config: dt must be positive");
  const int n = model.levels();
  if (target() < 1 || target() > n) throw DomainError("env config: target level out of range");
  if (initial() < 1 || initial() > n) throw DomainError("env config: initial level out of range");
}

Observation encode_state(const DensityMatrix& rho) {
  const int n = rho.dim();
  Observation out(2 * n * n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out[k++] = rho(i, j).real();
      out[k++] = rho(i, j).imag();
    }
  }
  return out;
}

DensityMatrix decode_state(std::span<const double> values) {
  const auto n = static_cast<int>(std::llround(std::sqrt(values.size() / 2.0)));
  if (static_cast<std::size_t>(2 * n * n) != values.size())
    throw InvalidDimension("decode_state: length is not 2 n^2");
  ComplexMatrix m(n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = Complex(values[k], values[k + 1]);
      k += 2;
    }
  }
  return DensityMatrix::trusted(std::move(m));
}

namespace {

std::shared_ptr<const BangBangPropagators> shared_propagators(const EnvConfig& config) {
  config.validate();
  return std::make_shared<const BangBangPropagators>(make_bang_bang(config.model, config.dt));
}

}  // namespace

ControlEnv::ControlEnv(EnvConfig config) : ControlEnv(config, shared_propagators(config)) {}

ControlEnv::ControlEnv(EnvConfig config, std::shared_ptr<const BangBangPropagators> propagators)
    : config_(std::move(config)),
      props_(std::move(propagators)),
      rho_(DensityMatrix::basis(std::max(config_.model.levels(), 1), 1)) {
  config_.validate();
  const auto n2 = config_.model.levels() * config_.model.levels();
  if (!props_ || props_->on.op.rows() != n2 || props_->off.op.rows() != n2)
    throw InvalidDimension("ControlEnv: propagators do not match the model");
  reset();
}

Observation ControlEnv::reset(std::uint64_t seed) {
  seed_ = seed;
  step_ = 0;
  rho_ = DensityMatrix::basis(config_.model.levels(), config_.initial());
  return encode_state(rho_);
}

double ControlEnv::fidelity() const { return qctrl::fidelity(rho_, config_.target()); }

StepResult ControlEnv::step(int action) {
  if (done()) throw ProtocolViolation("step called on a finished episode");
  if (action != 0 && action != 1) throw DomainError("action must be 0 or 1");
  const double before = fidelity();
  rho_ = propagate(rho_, (*props_)[action]);
  ++step_;
  StepResult r;
  r.fidelity = fidelity();
  r.reward = r.fidelity - before;
  r.done = done();
  r.observation = encode_state(rho_);
  return r;
}

Trajectory run_actions(const EnvConfig& config, const BangBangPropagators& props,
                       std::span<const int> actions) {
  config.validate();
  if (static_cast<int>(actions.size()) != config.steps)
    throw InvalidDimension("run_actions: protocol length differs from steps");
  Trajectory t;
  t.fidelity.reserve(actions.size() + 1);
  auto rho = DensityMatrix::basis(config.model.levels(), config.initial());
  t.fidelity.push_back(fidelity(rho, config.target()));
  for (int a : actions) {
    if (a != 0 && a != 1) throw DomainError("action must be 0 or 1");
    rho = propagate(rho, props[a]);
    t.fidelity.push_back(fidelity(rho, config.target()));
  }
  t.final_fidelity = t.fidelity.back();
  return t;
}

Trajectory run_protocol(const EnvConfig& config, const Protocol& protocol) {
  config.validate();
  if (static_cast<int>(protocol.size()) != config.steps)
    throw InvalidDimension("run_protocol: protocol length differs from steps");
  protocol.validate(config.model.gamma_max);
  if (protocol.mode == ProtocolMode::kBinary) {
    const auto props = make_bang_bang(config.model, config.dt);
    const auto actions = protocol.actions();
    return run_actions(config, props, actions);
  }

  std::map<double, Propagator> cache;
  Trajectory t;
  t.fidelity.reserve(protocol.size() + 1);
  auto rho = DensityMatrix::basis(config.model.levels(), config.initial());
  t.fidelity.push_back(fidelity(rho, config.target()));
  for (double g : protocol.amplitudes) {
    auto it = cache.find(g);
    if (it == cache.end())
      it = cache.emplace(g, exponentiate(build_liouvillian(config.model, g), config.dt, g)).first;
    rho = propagate(rho, it->second);
    t.fidelity.push_back(fidelity(rho, config.target()));
  }
  t.final_fidelity = t.fidelity.back();
  return t;
}

}  // namespace qctrl
