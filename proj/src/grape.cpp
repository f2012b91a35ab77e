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

#include <algorithm>
#include <cmath>
#include <random>

#include "qctrl/baselines.hpp"
#include "qctrl/errors.hpp"
#include "qctrl/expm.hpp"
#include "qctrl/parallel.hpp"

namespace qctrl {

namespace {

using cd = std::complex<double>;

// (e^x - e^y) / (x - y), continuous across x == y.
cd divided_difference_exp(cd x, cd y) {
  const cd d = x - y;
  if (std::abs(d) < 1e-3) {
    const cd series = 1.0 + d / 2.0 + d * d / 6.0 + d * d * d / 24.0 + d * d * d * d / 120.0;
    return std::exp(y) * series;
  }
  return (std::exp(x) - std::exp(y)) / d;
}

struct SliceEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

SliceEigen diagonalize(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("GRAPE: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// psi -> V diag(e^{-i lambda dt}) V^T psi
ComplexVector apply_unitary(const SliceEigen& s, double dt, const ComplexVector& psi) {
  ComplexVector coeffs = s.vectors.transpose().cast<cd>() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= std::exp(cd(0.0, -s.values[i] * dt));
  return s.vectors.cast<cd>() * coeffs;
}

// Row vector b^T -> b^T U, i.e. U^T b for symmetric V-structure.
ComplexVector apply_unitary_transpose(const SliceEigen& s, double dt, const ComplexVector& b) {
  return apply_unitary(s, dt, b);  // U = V D V^T is complex symmetric
}

void check_amplitudes(const EnvConfig& config, const std::vector<double>& amplitudes) {
  if (static_cast<int>(amplitudes.size()) != config.steps)
    throw InvalidDimension("GRAPE: protocol length differs from steps");
  for (double a : amplitudes)
    if (!std::isfinite(a)) throw NumericalError("GRAPE: non-finite amplitude");
}

}  // namespace

void GrapeConfig::validate() const {
  if (max_iterations < 1 || restarts < 0 || patience < 1)
    throw DomainError("GRAPE config: counts must be positive");
  if (!(convergence_tol > 0.0)) throw DomainError("GRAPE config: tolerance must be positive");
  if (!(step_size > 0.0)) throw DomainError("GRAPE config: step size must be positive");
  if (!(finite_difference_step > 0.0))
    throw DomainError("GRAPE config: finite-difference step must be positive");
}

GrapeObjective::GrapeObjective(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  const int n = config_.model.levels();
  closed_ = config_.model.closed();
  drift_ = build_drift(config_.model).real();
  coupling_ = build_coupling(n).real();
  if (!closed_) {
    lindblad_off_ = build_liouvillian(config_.model, 0.0).op;
    lindblad_coupling_ = commutator_superoperator(build_coupling(n)).op;
  }
}

double GrapeObjective::fidelity(const std::vector<double>& amplitudes) const {
  check_amplitudes(config_, amplitudes);
  const int n = config_.model.levels();
  const int t = config_.target() - 1;
  const double dt = config_.dt;
  if (closed_) {
    ComplexVector psi = ComplexVector::Zero(n);
    psi[config_.initial() - 1] = 1.0;
    for (double g : amplitudes) psi = apply_unitary(diagonalize(drift_ + g * coupling_), dt, psi);
    return std::norm(psi[t]);
  }
  ComplexVector r = ComplexVector::Zero(n * n);
  r[(config_.initial() - 1) * (n + 1)] = 1.0;
  for (double g : amplitudes) r = expm((lindblad_off_ + g * lindblad_coupling_) * dt) * r;
  return r[t * (n + 1)].real();
}

double GrapeObjective::gradient(const std::vector<double>& amplitudes,
                                std::vector<double>& grad) const {
  check_amplitudes(config_, amplitudes);
  const int n = config_.model.levels();
  const int t = config_.target() - 1;
  const double dt = config_.dt;
  const auto steps = amplitudes.size();
  grad.assign(steps, 0.0);

  if (closed_) {
    std::vector<SliceEigen> slices;
    slices.reserve(steps);
    std::vector<ComplexVector> states;
    states.reserve(steps + 1);
    ComplexVector psi = ComplexVector::Zero(n);
    psi[config_.initial() - 1] = 1.0;
    states.push_back(psi);
    for (double g : amplitudes) {
      slices.push_back(diagonalize(drift_ + g * coupling_));
      states.push_back(apply_unitary(slices.back(), dt, states.back()));
    }
    const cd amplitude = states.back()[t];
    ComplexVector costate = ComplexVector::Zero(n);  // b_k with c = b_k^T psi_k
    costate[t] = 1.0;
    for (std::size_t k = steps; k-- > 0;) {
      const auto& s = slices[k];
      const Eigen::MatrixXd hc_eig = s.vectors.transpose() * coupling_ * s.vectors;
      const ComplexVector left = s.vectors.transpose().cast<cd>() * costate;
      const ComplexVector right = s.vectors.transpose().cast<cd>() * states[k];
      cd dc = 0.0;
      for (int i = 0; i < n; ++i) {
        const cd mi(0.0, -s.values[i] * dt);
        for (int j = 0; j < n; ++j) {
          const cd mj(0.0, -s.values[j] * dt);
          dc += left[i] * divided_difference_exp(mi, mj) * cd(0.0, -dt) * hc_eig(i, j) * right[j];
        }
      }
      grad[k] = 2.0 * (std::conj(amplitude) * dc).real();
      costate = apply_unitary_transpose(s, dt, costate);
    }
    return std::norm(amplitude);
  }

  std::vector<ComplexMatrix> props(steps), derivs(steps);
  std::vector<ComplexVector> states;
  states.reserve(steps + 1);
  ComplexVector r = ComplexVector::Zero(n * n);
  r[(config_.initial() - 1) * (n + 1)] = 1.0;
  states.push_back(r);
  const ComplexMatrix direction = lindblad_coupling_ * dt;
  for (std::size_t k = 0; k < steps; ++k) {
    auto [p, dp] = expm_frechet((lindblad_off_ + amplitudes[k] * lindblad_coupling_) * dt, direction);
    states.push_back(p * states.back());
    props[k] = std::move(p);
    derivs[k] = std::move(dp);
  }
  Eigen::RowVectorXcd costate = Eigen::RowVectorXcd::Zero(n * n);
  costate[t * (n + 1)] = 1.0;
  for (std::size_t k = steps; k-- > 0;) {
    grad[k] = (costate * derivs[k] * states[k]).value().real();
    costate = costate * props[k];
  }
  return states.back()[t * (n + 1)].real();
}

double GrapeObjective::finite_difference_gradient(const std::vector<double>& amplitudes,
                                                  double step, std::vector<double>& grad) const {
  check_amplitudes(config_, amplitudes);
  const double gmax = config_.model.gamma_max;
  const double f0 = fidelity(amplitudes);
  grad.assign(amplitudes.size(), 0.0);
  std::vector<double> x = amplitudes;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = amplitudes[k];
    const bool can_down = v - step >= 0.0;
    const bool can_up = v + step <= gmax;
    if (can_down && can_up) {
      x[k] = v + step;
      const double fp = fidelity(x);
      x[k] = v - step;
      const double fm = fidelity(x);
      grad[k] = (fp - fm) / (2.0 * step);
    } else if (can_up) {
      x[k] = v + step;
      grad[k] = (fidelity(x) - f0) / step;
    } else if (can_down) {
      x[k] = v - step;
      grad[k] = (f0 - fidelity(x)) / step;
    }
    x[k] = v;
  }
  return f0;
}

std::vector<double> grape_gradient(const Protocol& protocol, const EnvConfig& config,
                                   GradientMode mode) {
  const GrapeObjective objective(config);
  std::vector<double> grad;
  if (mode == GradientMode::kAdjoint)
    objective.gradient(protocol.amplitudes, grad);
  else
    objective.finite_difference_gradient(protocol.amplitudes, GrapeConfig{}.finite_difference_step,
                                         grad);
  return grad;
}

GrapeResult grape_ascend(const GrapeObjective& objective, const GrapeConfig& grape,
                         std::vector<double> x) {
  grape.validate();
  const double gmax = objective.config().model.gamma_max;
  for (double& v : x) v = std::clamp(v, 0.0, gmax);
  std::vector<double> grad;
  std::vector<double> trial(x.size());
  std::vector<double> history;
  double f = objective.fidelity(x);
  history.push_back(f);

  int it = 0;
  for (; it < grape.max_iterations; ++it) {
    if (grape.gradient_mode == GradientMode::kAdjoint)
      objective.gradient(x, grad);
    else
      objective.finite_difference_gradient(x, grape.finite_difference_step, grad);

    // Components pushing against an active bound cannot move.
    double scale = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!std::isfinite(grad[k]))
        throw NumericalError("GRAPE: non-finite gradient at iteration " + std::to_string(it));
      if ((x[k] <= 0.0 && grad[k] < 0.0) || (x[k] >= gmax && grad[k] > 0.0)) grad[k] = 0.0;
      scale = std::max(scale, std::abs(grad[k]));
    }
    if (scale == 0.0) break;

    double step = grape.step_size * gmax / scale;
    bool improved = false;
    for (int halving = 0; halving < 50 && !improved; ++halving, step *= 0.5) {
      for (std::size_t k = 0; k < x.size(); ++k)
        trial[k] = std::clamp(x[k] + step * grad[k], 0.0, gmax);
      const double ft = objective.fidelity(trial);
      if (!std::isfinite(ft)) throw NumericalError("GRAPE: non-finite fidelity");
      if (ft > f) {
        x.swap(trial);
        f = ft;
        improved = true;
      }
    }
    if (!improved) break;
    history.push_back(f);
    const auto h = history.size();
    if (h > static_cast<std::size_t>(grape.patience) &&
        f - history[h - 1 - grape.patience] < grape.convergence_tol) {
      ++it;
      break;
    }
  }

  GrapeResult out;
  out.protocol.mode = ProtocolMode::kContinuous;
  out.protocol.amplitudes = std::move(x);
  out.fidelity = f;
  out.iterations = it;
  return out;
}

GrapeResult grape_optimize(const EnvConfig& config, const GrapeConfig& grape, std::uint64_t seed,
                           const std::vector<Protocol>& warm_starts) {
  grape.validate();
  const GrapeObjective objective(config);
  const double gmax = config.model.gamma_max;
  const auto steps = static_cast<std::size_t>(config.steps);

  std::vector<std::vector<double>> starts;
  starts.emplace_back(steps, 0.0);
  starts.emplace_back(steps, gmax);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, gmax);
  for (int r = 0; r < grape.restarts; ++r) {
    std::vector<double> s(steps);
    for (double& v : s) v = uniform(rng);
    starts.push_back(std::move(s));
  }
  for (const auto& p : warm_starts) {
    if (p.size() != steps) throw InvalidDimension("GRAPE: warm start has the wrong length");
    starts.push_back(p.amplitudes);
  }

  std::vector<GrapeResult> runs(starts.size());
  parallel_for(static_cast<int>(starts.size()), resolve_threads(grape.max_threads),
               [&](int i) { runs[i] = grape_ascend(objective, grape, starts[i]); });

  GrapeResult best = runs.front();
  int total = 0;
  for (const auto& r : runs) {
    total += r.iterations;
    if (r.fidelity > best.fidelity) best = r;
  }
  best.iterations = total;
  return best;
}

}  // namespace qctrl
