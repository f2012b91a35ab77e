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

#include <utility>

#include <Eigen/Dense>

namespace qctrl {

/// Dense matrix exponential by scaling and squaring with a diagonal Pade
/// kernel of degree 3, 5, 7, 9 or 13 (Higham's 2005 selection). The kernel
/// degree is chosen so the backward error is below unit roundoff.
/// Throws NumericalError on non-finite input.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// exp(A) together with the Frechet derivative of exp at A in direction E,
/// read off the exponential of the block matrix [[A, E], [0, A]].
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> expm_frechet(const Eigen::MatrixXcd& a,
                                                          const Eigen::MatrixXcd& e);

}  // namespace qctrl
