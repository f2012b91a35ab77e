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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qctrl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Tolerances a density matrix must satisfy.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPositivityTol = 1e-8;

/// n-level ladder: drift energies, the bang-bang coupling amplitude and the
/// two dissipation rates. Energies need not be sorted; see `sorted()`.
struct LadderModel {
  std::vector<double> energies;
  double gamma_max = 0.0;
  double dephasing_rate = 0.0;
  double decay_rate = 0.0;

  int levels() const { return static_cast<int>(energies.size()); }
  bool sorted() const;
  bool closed() const { return dephasing_rate == 0.0 && decay_rate == 0.0; }
  /// Throws InvalidDimension / DomainError when the model is not usable.
  void validate() const;

  /// E_i = i for i = 1..n.
  static LadderModel regular(int n, double gamma_max, double dephasing_rate = 0.0,
                             double decay_rate = 0.0);
};

/// Hermitian, unit-trace, positive semidefinite state. Construction from an
/// arbitrary matrix validates; `trusted` skips the check for values produced
/// by trace-preserving maps.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix trusted(ComplexMatrix m);
  /// |level><level|, 1-based.
  static DensityMatrix basis(int n, int level);
  static DensityMatrix maximally_mixed(int n);

  const ComplexMatrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  Complex operator()(int i, int j) const { return mat_(i, j); }

 private:
  struct Trusted {};
  DensityMatrix(ComplexMatrix m, Trusted) : mat_(std::move(m)) {}

  ComplexMatrix mat_;
};

/// Measured deviations of a matrix from the density-matrix constraints.
struct StateDiagnostics {
  double hermiticity_error;  // max |rho - rho^dagger|
  double trace_error;        // |tr(rho) - 1|
  double min_eigenvalue;
  bool valid() const {
    return hermiticity_error <= kHermitianTol && trace_error <= kTraceTol &&
           min_eigenvalue >= -kPositivityTol;
  }
};
StateDiagnostics diagnose_state(const ComplexMatrix& m);

/// Linear map on column-stacked n x n matrices.
struct Superoperator {
  ComplexMatrix op;
  int dim() const { return static_cast<int>(op.rows()); }
};

/// exp(L dt) for one slice at a fixed coupling value.
struct Propagator {
  ComplexMatrix op;
  double dt = 0.0;
  double gamma_value = 0.0;
};

/// A jump operator with its rate.
struct Channel {
  ComplexMatrix op;
  double rate;
};

ComplexMatrix build_drift(const LadderModel& model);
/// Nearest-neighbour ladder with unit amplitude: |i><i+1| + |i+1><i|.
ComplexMatrix build_coupling(int n);
/// Dephasing projectors |k><k| at the dephasing rate, then decay operators
/// |1><k| at the decay rate; channels with zero rate are omitted.
std::vector<Channel> build_channels(const LadderModel& model);

/// Column-stacking convention: vec(A rho B) = (B^T kron A) vec(rho).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix devectorize(const ComplexVector& v);

/// Superoperator of -i[H, .] for a Hermitian H.
Superoperator commutator_superoperator(const ComplexMatrix& h);
/// Dissipator sum_k rate_k (A rho A^dagger - {A^dagger A, rho}/2).
Superoperator dissipator_superoperator(const std::vector<Channel>& channels, int n);

/// Full Lindblad generator at coupling `gamma_value` in [0, gamma_max].
Superoperator build_liouvillian(const LadderModel& model, double gamma_value);

/// `gamma_value` only labels the result.
Propagator exponentiate(const Superoperator& l, double dt, double gamma_value = 0.0);

/// Applies one slice and re-Hermitizes the result.
DensityMatrix propagate(const DensityMatrix& rho, const Propagator& p);

/// <target|rho|target>, `target_level` 1-based.
double fidelity(const DensityMatrix& rho, int target_level);

/// The two slice propagators of a bang-bang protocol.
struct BangBangPropagators {
  Propagator off;
  Propagator on;
  const Propagator& operator[](int action) const { return action ? on : off; }
};
BangBangPropagators make_bang_bang(const LadderModel& model, double dt);

}  // namespace qctrl
