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

#include "qctrl/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qctrl/errors.hpp"
#include "qctrl/expm.hpp"

namespace qctrl {

bool LadderModel::sorted() const { return std::is_sorted(energies.begin(), energies.end()); }

void LadderModel::validate() const {
  if (levels() < 2) throw InvalidDimension("ladder model needs at least 2 levels");
  for (double e : energies)
    if (!std::isfinite(e)) throw DomainError("ladder model: non-finite energy");
  auto check_rate = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw DomainError(std::string("ladder model: ") + name + " must be finite and >= 0");
  };
  check_rate(gamma_max, "gamma_max");
  check_rate(dephasing_rate, "dephasing_rate");
  check_rate(decay_rate, "decay_rate");
}

LadderModel LadderModel::regular(int n, double gamma_max, double dephasing_rate,
                                 double decay_rate) {
  LadderModel m;
  m.energies.resize(std::max(n, 0));
  for (int i = 0; i < n; ++i) m.energies[i] = i + 1.0;
  m.gamma_max = gamma_max;
  m.dephasing_rate = dephasing_rate;
  m.decay_rate = decay_rate;
  return m;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
    throw InvalidDimension("density matrix must be square and non-empty");
  if (!mat_.allFinite()) throw NumericalError("density matrix has non-finite entries");
  const auto d = diagnose_state(mat_);
  if (d.hermiticity_error > kHermitianTol) throw DomainError("density matrix is not Hermitian");
  if (d.trace_error > kTraceTol) throw DomainError("density matrix trace differs from 1");
  if (d.min_eigenvalue < -kPositivityTol)
    throw DomainError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix m) { return {std::move(m), Trusted{}}; }

DensityMatrix DensityMatrix::basis(int n, int level) {
  if (n < 1) throw InvalidDimension("basis state: n must be positive");
  if (level < 1 || level > n) throw std::out_of_range("basis state: level out of range");
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(level - 1, level - 1) = 1.0;
  return trusted(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  if (n < 1) throw InvalidDimension("maximally mixed state: n must be positive");
  return trusted(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
}

StateDiagnostics diagnose_state(const ComplexMatrix& m) {
  StateDiagnostics d{};
  d.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

ComplexMatrix build_drift(const LadderModel& model) {
  model.validate();
  const int n = model.levels();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = model.energies[i];
  return h;
}

ComplexMatrix build_coupling(int n) {
  if (n < 2) throw InvalidDimension("coupling needs n >= 2");
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    v(i, i + 1) = 1.0;
    v(i + 1, i) = 1.0;
  }
  return v;
}

std::vector<Channel> build_channels(const LadderModel& model) {
  model.validate();
  const int n = model.levels();
  std::vector<Channel> out;
  if (model.dephasing_rate > 0.0) {
    for (int k = 0; k < n; ++k) {
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(k, k) = 1.0;
      out.push_back({std::move(a), model.dephasing_rate});
    }
  }
  if (model.decay_rate > 0.0) {
    for (int k = 1; k < n; ++k) {
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(0, k) = 1.0;
      out.push_back({std::move(a), model.decay_rate});
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix devectorize(const ComplexVector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw InvalidDimension("devectorize: length is not a perfect square");
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

Superoperator commutator_superoperator(const ComplexMatrix& h) {
  const auto n = h.rows();
  const ComplexMatrix ident = ComplexMatrix::Identity(n, n);
  const Complex minus_i(0.0, -1.0);
  return {minus_i * (kron(ident, h) - kron(h.transpose(), ident))};
}

Superoperator dissipator_superoperator(const std::vector<Channel>& channels, int n) {
  const ComplexMatrix ident = ComplexMatrix::Identity(n, n);
  ComplexMatrix d = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& ch : channels) {
    if (ch.op.rows() != n || ch.op.cols() != n)
      throw InvalidDimension("dissipator: channel shape mismatch");
    const ComplexMatrix ada = ch.op.adjoint() * ch.op;
    d += ch.rate * (kron(ch.op.conjugate(), ch.op) - 0.5 * kron(ident, ada) -
                    0.5 * kron(ada.transpose(), ident));
  }
  return {std::move(d)};
}

Superoperator build_liouvillian(const LadderModel& model, double gamma_value) {
  model.validate();
  if (!(gamma_value >= 0.0 && gamma_value <= model.gamma_max))
    throw DomainError("build_liouvillian: coupling outside [0, gamma_max]");
  const int n = model.levels();
  const ComplexMatrix h = build_drift(model) + gamma_value * build_coupling(n);
  Superoperator l = commutator_superoperator(h);
  if (!model.closed()) l.op += dissipator_superoperator(build_channels(model), n).op;
  return l;
}

Propagator exponentiate(const Superoperator& l, double dt, double gamma_value) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("exponentiate: dt must be positive");
  if (!l.op.allFinite()) throw NumericalError("exponentiate: non-finite generator");
  return {expm(l.op * dt), dt, gamma_value};
}

DensityMatrix propagate(const DensityMatrix& rho, const Propagator& p) {
  const auto n = rho.dim();
  if (p.op.rows() != n * n || p.op.cols() != n * n)
    throw InvalidDimension("propagate: propagator does not match state dimension");
  const ComplexVector out = p.op * vectorize(rho.matrix());
  ComplexMatrix m = Eigen::Map<const ComplexMatrix>(out.data(), n, n);
  return DensityMatrix::trusted(0.5 * (m + m.adjoint()));
}

double fidelity(const DensityMatrix& rho, int target_level) {
  if (target_level < 1 || target_level > rho.dim())
    throw std::out_of_range("fidelity: target level out of range");
  return rho(target_level - 1, target_level - 1).real();
}

BangBangPropagators make_bang_bang(const LadderModel& model, double dt) {
  BangBangPropagators out;
  out.off = exponentiate(build_liouvillian(model, 0.0), dt);
  out.on = exponentiate(build_liouvillian(model, model.gamma_max), dt, model.gamma_max);
  return out;
}

}  // namespace qctrl
