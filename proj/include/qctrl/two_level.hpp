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

#include <Eigen/Dense>

namespace qctrl::two_level {

/// Closed two-level system H = -(omega/2) sigma_z + gamma sigma_x (hbar = 1)
/// with an initial pure state cos(g0/2)|0> + e^{i phi} sin(g0/2)|1>.
///
/// The ladder model with n = 2 maps onto this with omega = E2 - E1; the two
/// Hamiltonians differ by (E1 + E2)/2 times the identity, which only
/// contributes a global phase.
struct Params {
  double omega = 1.0;
  double gamma = 0.0;
  double initial_polar = 0.0;  // g0
  double initial_phase = 0.0;  // phi

  /// Mixing angle with tan(theta) = 2 gamma / omega.
  double theta() const;
  /// E_+ = sqrt(omega^2/4 + gamma^2); E_- = -E_+.
  double energy_plus() const;
  double energy_minus() const { return -energy_plus(); }
  Eigen::Vector2cd initial_state() const;
};

/// exp(-i H t) in closed form.
Eigen::Matrix2cd propagator(const Params& p, double t);

/// Im(-a conj(b)). Negative values mean switching the coupling on raises
/// the excited-state population.
double switch_indicator(std::complex<double> a, std::complex<double> b);

/// Closed-form Im(-a_tau conj(b_tau)) after the coupling has been held on
/// for a duration tau starting from the initial state.
double switch_time_residual(const Params& p, double tau);

/// First root of the residual in [lo, hi] located by bisection, if the
/// residual changes sign over that interval.
bool bisect_switch_time(const Params& p, double lo, double hi, double tol, double& root);

}  // namespace qctrl::two_level
