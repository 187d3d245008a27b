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

#include <vector>

#include "qudit/common.hpp"

namespace qudit {

enum class PulseFrame { rotating, lab };

/// Piecewise-constant complex drive envelope xi(t) in rad/ns.
///
/// Sample n holds the value on [n dt, (n+1) dt); u1 = Re(xi), u2 = Im(xi).
struct ControlPulse {
    double dt_ns = 0.0;
    std::vector<cplx> samples;
    PulseFrame frame = PulseFrame::rotating;

    double gate_time_ns() const { return dt_ns * static_cast<double>(samples.size()); }
    std::size_t size() const { return samples.size(); }
    double max_amplitude() const;

    static ControlPulse zeros(double dt_ns, std::size_t n) {
        return ControlPulse{dt_ns, std::vector<cplx>(n, cplx{0.0, 0.0}), PulseFrame::rotating};
    }
};

/// Real laboratory-frame drive s(t) sampled at t_k = k / sample_rate.
struct LabWaveform {
    double sample_rate_per_ns = 32.0;
    std::vector<double> samples;  // rad/ns drive units
    double duration_ns = 0.0;
    double carrier_ghz = 0.0;
    double scale_volts = 1.0;  // external volts-per-(rad/ns) factor, informational

    double dt_ns() const { return 1.0 / sample_rate_per_ns; }
};

/// Same envelope on a grid `factor` times finer (each sample repeated).
ControlPulse refine(const ControlPulse& pulse, int factor);

}  // namespace qudit
