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

#include "qudit/common.hpp"

namespace qudit {

/// exp(-i H tau) for Hermitian H, keeping the spectral decomposition so the
/// directional derivative can be formed without another factorization.
struct HermitianExp {
    Mat vectors;
    RVec values;
    double tau = 0.0;
    Mat value;  // exp(-i H tau)

    /// Spectral radius times tau, the quantity checked against grid refinement.
    double phase_span() const { return values.cwiseAbs().maxCoeff() * tau; }
};

HermitianExp exp_minus_i(const Mat& h, double tau);

/// d/ds exp(-i (H + s D) tau) at s = 0 (Daleckii-Krein formula).
Mat exp_derivative(const HermitianExp& e, const Mat& direction);

/// Column-stacking vectorization helpers for d x d matrices.
Vec vectorize(const Mat& m);
Mat unvectorize(const Vec& v, int d);

/// Principal square root of a Hermitian positive semidefinite matrix.
Mat psd_sqrt(const Mat& m);

}  // namespace qudit
