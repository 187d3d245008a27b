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

#include <random>

#include "qudit/model.hpp"
#include "qudit/pulse.hpp"

namespace qudit::testing {

/// Smooth random envelope: a few random Fourier modes, scaled to `amplitude`.
inline ControlPulse random_pulse(std::size_t n, double dt_ns, double amplitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const int modes = 4;
    std::vector<cplx> coef(modes);
    for (auto& c : coef) c = cplx(g(rng), g(rng));
    ControlPulse p = ControlPulse::zeros(dt_ns, n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = 0.0;
        for (int m = 0; m < modes; ++m)
            v += coef[m] * std::sin(kPi * (m + 1) * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
        p.samples[i] = v;
        peak = std::max(peak, std::abs(v));
    }
    for (auto& s : p.samples) s *= amplitude / peak;
    return p;
}

/// Single-transition device used for closed-form two-level checks.
inline DeviceSpec two_level_device(double f01_ghz = 4.0, double t1_us = 50.0, double t2_us = 40.0) {
    DeviceSpec s;
    s.dim = 2;
    s.transition_freqs_ghz = {f01_ghz};
    s.t1_us = {t1_us};
    s.t2_us = {t2_us};
    s.t2_kind = {T2Kind::ramsey};
    return s;
}

/// Leading three levels of the reference device.
inline DeviceSpec three_level_device() {
    DeviceSpec s = reference_device();
    s.dim = 3;
    s.transition_freqs_ghz.resize(2);
    s.t1_us.resize(2);
    s.t2_us.resize(2);
    s.t2_kind.resize(2);
    s.t2_ramsey_us.resize(2);
    s.guard_index = -1;
    return s;
}

inline Mat random_unitary(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Mat z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(z);
    return qr.householderQ() * Mat::Identity(d, d);
}

inline Vec basis_vector(int dim, int k) {
    Vec v = Vec::Zero(dim);
    v[k] = 1.0;
    return v;
}

}  // namespace qudit::testing
