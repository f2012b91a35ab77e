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

#include <cmath>

#include "qctrl/baselines.hpp"
#include "qctrl/errors.hpp"

namespace qctrl {

LyapunovIndicators lyapunov_indicators(const DensityMatrix& rho, const LadderModel& model,
                                       int target_level) {
  const int n = model.levels();
  if (rho.dim() != n) throw InvalidDimension("lyapunov_indicators: state dimension mismatch");
  const int t = (target_level > 0 ? target_level : n) - 1;
  if (t < 0 || t >= n) throw std::out_of_range("lyapunov_indicators: target out of range");
  const ComplexMatrix& r = rho.matrix();

  Complex c = 0.0;
  for (const auto& ch : build_channels(model)) {
    const ComplexMatrix ada = ch.op.adjoint() * ch.op;
    const ComplexMatrix term =
        ch.op * r * ch.op.adjoint() - 0.5 * (ada * r + r * ada);
    c += ch.rate * term(t, t);
  }

  const ComplexMatrix hc = build_coupling(n);
  ComplexMatrix proj = ComplexMatrix::Zero(n, n);
  proj(t, t) = 1.0;
  const Complex d = Complex(0.0, -1.0) * (r * (proj * hc - hc * proj)).trace();
  return {c.real(), d.real()};
}

int greedy_step(const DensityMatrix& rho, const EnvConfig& config,
                const BangBangPropagators& props, GreedyMode mode) {
  if (mode == GreedyMode::kLyapunov) {
    const auto ind = lyapunov_indicators(rho, config.model, config.target());
    const bool on = (ind.d > 0.0 && ind.c <= 0.0) || (ind.d <= 0.0 && ind.c > 0.0);
    return on ? 1 : 0;
  }
  const double off = fidelity(propagate(rho, props.off), config.target());
  const double on = fidelity(propagate(rho, props.on), config.target());
  return on > off ? 1 : 0;
}

GreedyResult run_greedy(const EnvConfig& config, GreedyMode mode) {
  config.validate();
  const auto props = make_bang_bang(config.model, config.dt);
  auto rho = DensityMatrix::basis(config.model.levels(), config.initial());
  std::vector<int> actions;
  actions.reserve(config.steps);
  for (int k = 0; k < config.steps; ++k) {
    const int a = greedy_step(rho, config, props, mode);
    actions.push_back(a);
    rho = propagate(rho, props[a]);
  }
  GreedyResult out;
  out.protocol = Protocol::from_actions(actions, config.model.gamma_max);
  out.trajectory = run_actions(config, props, actions);
  return out;
}

SearchResult exhaustive_search(const EnvConfig& config, int max_steps) {
  config.validate();
  if (config.steps > max_steps)
    throw DomainError("exhaustive_search: " + std::to_string(config.steps) +
                      " steps exceed the limit of " + std::to_string(max_steps));
  const auto props = make_bang_bang(config.model, config.dt);
  const int steps = config.steps;
  const int target = config.target();

  std::vector<int> path;
  path.reserve(steps);
  std::vector<int> best_path;
  double best = -1.0;

  // Depth-first, action 0 before action 1; strict improvement keeps the
  // lexicographically smallest maximizer.
  auto visit = [&](auto& self, const DensityMatrix& rho) -> void {
    if (static_cast<int>(path.size()) == steps) {
      const double f = fidelity(rho, target);
      if (f > best) {
        best = f;
        best_path = path;
      }
      return;
    }
    for (int a = 0; a < 2; ++a) {
      path.push_back(a);
      self(self, propagate(rho, props[a]));
      path.pop_back();
    }
  };
  visit(visit, DensityMatrix::basis(config.model.levels(), config.initial()));

  SearchResult out;
  out.protocol = Protocol::from_actions(best_path, config.model.gamma_max);
  out.fidelity = best;
  return out;
}

}  // namespace qctrl
