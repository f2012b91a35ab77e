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

#include "qctrl/two_level.hpp"

#include <cmath>

#include "qctrl/errors.hpp"

namespace qctrl::two_level {

using cd = std::complex<double>;

double Params::theta() const { return std::atan2(2.0 * gamma, omega); }

double Params::energy_plus() const { return std::sqrt(omega * omega / 4.0 + gamma * gamma); }

Eigen::Vector2cd Params::initial_state() const {
  return {cd(std::cos(initial_polar / 2.0), 0.0),
          std::polar(std::sin(initial_polar / 2.0), initial_phase)};
}

Eigen::Matrix2cd propagator(const Params& p, double t) {
  if (t < 0.0) throw DomainError("two-level propagator: t must be >= 0");
  const double th = p.theta();
  const double c2 = std::cos(th / 2.0) * std::cos(th / 2.0);
  const double s2 = std::sin(th / 2.0) * std::sin(th / 2.0);
  const cd em = std::exp(cd(0.0, -p.energy_minus() * t));
  const cd ep = std::exp(cd(0.0, -p.energy_plus() * t));
  const cd off = 0.5 * (ep - em) * std::sin(th);
  Eigen::Matrix2cd u;
  u << em * c2 + ep * s2, off, off, em * s2 + ep * c2;
  return u;
}

double switch_indicator(cd a, cd b) { return (-a * std::conj(b)).imag(); }

double switch_time_residual(const Params& p, double tau) {
  if (tau < 0.0) throw DomainError("switch_time_residual: tau must be >= 0");
  const double th = p.theta();
  const double g0 = p.initial_polar;
  const double phi = p.initial_phase;
  const double arg = 2.0 * p.energy_minus() * tau;
  return 0.5 * (std::sin(arg) * (std::cos(th) * std::sin(g0) * std::cos(phi) +
                                 std::sin(th) * std::cos(g0)) +
                std::sin(g0) * std::sin(phi) * std::cos(arg));
}

bool bisect_switch_time(const Params& p, double lo, double hi, double tol, double& root) {
  double flo = switch_time_residual(p, lo);
  const double fhi = switch_time_residual(p, hi);
  if (flo == 0.0) {
    root = lo;
    return true;
  }
  if (std::signbit(flo) == std::signbit(fhi)) return false;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = switch_time_residual(p, mid);
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  root = 0.5 * (lo + hi);
  return true;
}

}  // namespace qctrl::two_level
