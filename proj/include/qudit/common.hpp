// Copyright 2026 The Qudit Control Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace qudit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Internal units are rad/ns and ns. Conversions happen only at file boundaries.
inline constexpr double ghz_to_rad_per_ns(double f_ghz) { return kTwoPi * f_ghz; }
inline constexpr double mhz_to_rad_per_ns(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }
inline constexpr double rad_per_ns_to_ghz(double w) { return w / kTwoPi; }
inline constexpr double rad_per_ns_to_mhz(double w) { return w / kTwoPi * 1e3; }
inline constexpr double us_to_ns(double t_us) { return t_us * 1e3; }

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double unitarity_deviation(const Mat& u) {
    return max_abs(u.adjoint() * u - Mat::Identity(u.cols(), u.cols()));
}

inline double hermiticity_deviation(const Mat& m) { return max_abs(m - m.adjoint()); }

// Deterministic 64-bit mixer used to derive per-worker RNG streams from one seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace qudit
