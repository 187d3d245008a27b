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

#include "qudit/linalg.hpp"

#include <cmath>

namespace qudit {

HermitianExp exp_minus_i(const Mat& h, double tau) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    HermitianExp e;
    e.vectors = es.eigenvectors();
    e.values = es.eigenvalues();
    e.tau = tau;
    Vec phases(h.rows());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::exp(-kI * (e.values[k] * tau));
    e.value = e.vectors * phases.asDiagonal() * e.vectors.adjoint();
    return e;
}

Mat exp_derivative(const HermitianExp& e, const Mat& direction) {
    const Eigen::Index n = e.values.size();
    Mat d = e.vectors.adjoint() * direction * e.vectors;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            // (e^{-i a t} - e^{-i b t}) / (a - b), written without cancellation.
            const double half = 0.5 * (e.values[j] - e.values[k]) * e.tau;
            const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
            const cplx mid = std::exp(-kI * (0.5 * (e.values[j] + e.values[k]) * e.tau));
            d(j, k) *= -kI * e.tau * mid * sinc;
        }
    }
    return e.vectors * d * e.vectors.adjoint();
}

Vec vectorize(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unvectorize(const Vec& v, int d) { return Eigen::Map<const Mat>(v.data(), d, d); }

Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
    RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace qudit
