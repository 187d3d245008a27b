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

#include "qudit/pulse.hpp"

namespace qudit {

struct SynthesisOptions {
    double sample_rate_per_ns = 32.0;
    int half_width = 24;  // windowed-sinc taps per side, in coarse samples
};

/// Windowed-sinc (Kaiser) reconstruction of uniformly spaced samples at
/// fractional index u; samples outside the record count as zero.
double interpolate_samples(const std::vector<double>& samples, double u, int half_width = 24);

/// Band-limited upsampling of a piecewise-constant envelope. Coarse sample n
/// is anchored at its interval midpoint (n + 1/2) dt; output point k sits at
/// k / rate.
std::vector<cplx> upsample_envelope(const ControlPulse& pulse, double sample_rate_per_ns, int half_width = 24);

/// s(t) = 2 Re(xi) cos(omega_d t) + 2 Im(xi) sin(omega_d t) on the AWG grid.
LabWaveform synthesize_lab(const ControlPulse& pulse, double omega_d, const SynthesisOptions& opts = {});

/// Mixes s(t) down by exp(i omega_d t) and removes everything above f_max.
std::vector<cplx> demodulate(const LabWaveform& wave, double omega_d, double f_max_ghz);

/// Morlet wavelet magnitude |W(f, t)| on a frequency grid.
struct Scalogram {
    std::vector<double> freqs_ghz;
    std::vector<double> times_ns;
    RMat magnitude;  // rows: frequencies, columns: times
    double cycles = 150.0;

    /// Index of the grid frequency nearest f.
    std::size_t nearest(double f_ghz) const;
    /// |W| versus time at the grid frequency nearest f.
    RVec linecut(double f_ghz) const;
    /// Time average of |W|^2 for every grid frequency.
    RVec mean_energy() const;
};

/// Evenly spaced grid including both ends.
std::vector<double> frequency_grid(double f_lo_ghz, double f_hi_ghz, double step_ghz);

/// Continuous wavelet transform with L2-normalized Morlet wavelets whose
/// Gaussian width is sigma = cycles / (2 pi f). Computed by FFT convolution,
/// parallel over frequencies. Throws RangeError above Nyquist.
Scalogram morlet_cwt(const LabWaveform& wave, const std::vector<double>& freqs_ghz, double cycles = 150.0);

/// Serial direct-convolution reference for morlet_cwt.
Scalogram morlet_cwt_reference(const LabWaveform& wave, const std::vector<double>& freqs_ghz,
                               double cycles = 150.0);

/// Local maxima of a sampled curve, largest first.
std::vector<std::size_t> peak_indices(const RVec& curve);

}  // namespace qudit
