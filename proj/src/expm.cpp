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

#include "qctrl/expm.hpp"

#include <array>
#include <cmath>

#include "qctrl/errors.hpp"

namespace qctrl {
namespace {

using Mat = Eigen::MatrixXcd;

constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

constexpr std::array<double, 4> kB3 = {120., 60., 12., 1.};
constexpr std::array<double, 6> kB5 = {30240., 15120., 3360., 420., 30., 1.};
constexpr std::array<double, 8> kB7 = {17297280., 8648640., 1995840., 277200.,
                                       25200.,    1512.,    56.,      1.};
constexpr std::array<double, 10> kB9 = {17643225600., 8821612800., 2075673600., 302702400.,
                                        30270240.,    2162160.,    110880.,     3960.,
                                        90.,          1.};
constexpr std::array<double, 14> kB13 = {
    64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
    129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
    1323241920.,        40840800.,          960960.,           16380.,
    182.,               1.};

// Pade kernel of degree m <= 9 via even powers of A.
template <std::size_t K>
Mat pade_small(const Mat& a, const std::array<double, K>& b) {
  const auto n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  Mat pow = ident;
  Mat u_poly = Mat::Zero(n, n);
  Mat v = Mat::Zero(n, n);
  for (std::size_t k = 0; k + 1 < K; k += 2) {
    v += b[k] * pow;
    u_poly += b[k + 1] * pow;
    pow = pow * a2;
  }
  const Mat u = a * u_poly;
  return (v - u).partialPivLu().solve(v + u);
}

Mat pade13(const Mat& a) {
  const auto n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const auto& b = kB13;
  const Mat u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  const Mat u = a * (u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Mat v_inner = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  const Mat v = v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Mat expm(const Mat& a) {
  if (a.rows() != a.cols()) throw InvalidDimension("expm: matrix must be square");
  if (!a.allFinite()) throw NumericalError("expm: non-finite entries");
  if (a.rows() == 0) return a;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= kTheta[0]) return pade_small(a, kB3);
  if (norm1 <= kTheta[1]) return pade_small(a, kB5);
  if (norm1 <= kTheta[2]) return pade_small(a, kB7);
  if (norm1 <= kTheta[3]) return pade_small(a, kB9);

  int squarings = 0;
  if (norm1 > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  Mat r = pade13(a * std::ldexp(1.0, -squarings));
  for (int i = 0; i < squarings; ++i) r = r * r;
  if (!r.allFinite()) throw NumericalError("expm: result overflowed");
  return r;
}

std::pair<Mat, Mat> expm_frechet(const Mat& a, const Mat& e) {
  if (a.rows() != a.cols() || e.rows() != a.rows() || e.cols() != a.cols())
    throw InvalidDimension("expm_frechet: shape mismatch");
  const auto n = a.rows();
  Mat block = Mat::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.bottomRightCorner(n, n) = a;
  block.topRightCorner(n, n) = e;
  const Mat x = expm(block);
  return {x.topLeftCorner(n, n), x.topRightCorner(n, n)};
}

}  // namespace qctrl
