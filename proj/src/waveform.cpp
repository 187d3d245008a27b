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

#include "qudit/waveform.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "qudit/errors.hpp"

namespace qudit {

namespace {

double kaiser(double x, double beta) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) / std::cyl_bessel_i(0.0, beta);
}

double windowed_sinc(double x, int half_width) {
    const double s = std::abs(x) < 1e-12 ? 1.0 : std::sin(kPi * x) / (kPi * x);
    return s * kaiser(x / half_width, 8.6);
}

}  // namespace

double interpolate_samples(const std::vector<double>& s, double u, int half_width) {
    const long centre = static_cast<long>(std::floor(u));
    const long last = static_cast<long>(s.size()) - 1;
    double acc = 0.0;
    for (long k = std::max(centre - half_width + 1, 0L); k <= std::min(centre + half_width, last); ++k)
        acc += s[static_cast<std::size_t>(k)] * windowed_sinc(u - static_cast<double>(k), half_width);
    return acc;
}

std::vector<cplx> upsample_envelope(const ControlPulse& pulse, double sample_rate_per_ns, int half_width) {
    const auto count = static_cast<std::size_t>(std::llround(pulse.gate_time_ns() * sample_rate_per_ns));
    std::vector<cplx> out(count);
    const auto n = static_cast<long>(pulse.samples.size());
    for (std::size_t k = 0; k < count; ++k) {
        const double u = static_cast<double>(k) / sample_rate_per_ns / pulse.dt_ns - 0.5;
        const long centre = static_cast<long>(std::floor(u));
        cplx acc{0.0, 0.0};
        for (long j = std::max(centre - half_width + 1, 0L); j <= std::min(centre + half_width, n - 1); ++j)
            acc += pulse.samples[static_cast<std::size_t>(j)] * windowed_sinc(u - static_cast<double>(j), half_width);
        out[k] = acc;
    }
    return out;
}

LabWaveform synthesize_lab(const ControlPulse& pulse, double omega_d, const SynthesisOptions& opts) {
    if (pulse.frame != PulseFrame::rotating) throw InvalidSpecError("synthesize_lab expects a rotating-frame pulse");
    const auto env = upsample_envelope(pulse, opts.sample_rate_per_ns, opts.half_width);
    LabWaveform w;
    w.sample_rate_per_ns = opts.sample_rate_per_ns;
    w.duration_ns = pulse.gate_time_ns();
    w.carrier_ghz = rad_per_ns_to_ghz(omega_d);
    w.samples.resize(env.size());
    for (std::size_t k = 0; k < env.size(); ++k) {
        const double t = static_cast<double>(k) / opts.sample_rate_per_ns;
        w.samples[k] = 2.0 * env[k].real() * std::cos(omega_d * t) + 2.0 * env[k].imag() * std::sin(omega_d * t);
    }
    return w;
}

std::vector<cplx> demodulate(const LabWaveform& wave, double omega_d, double f_max_ghz) {
    const std::size_t n = wave.samples.size();
    std::vector<cplx> mixed(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * wave.dt_ns();
        mixed[k] = wave.samples[k] * std::exp(kI * (omega_d * t));
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, mixed);
    for (std::size_t m = 0; m < n; ++m) {
        const double idx = m <= n / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
        if (std::abs(idx * wave.sample_rate_per_ns / static_cast<double>(n)) > f_max_ghz) spec[m] = 0.0;
    }
    std::vector<cplx> out;
    fft.inv(out, spec);
    return out;
}

std::size_t Scalogram::nearest(double f_ghz) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < freqs_ghz.size(); ++i)
        if (std::abs(freqs_ghz[i] - f_ghz) < std::abs(freqs_ghz[best] - f_ghz)) best = i;
    return best;
}

RVec Scalogram::linecut(double f_ghz) const { return magnitude.row(static_cast<Eigen::Index>(nearest(f_ghz))); }

RVec Scalogram::mean_energy() const {
    if (magnitude.cols() == 0) return RVec::Zero(magnitude.rows());
    return magnitude.array().square().rowwise().mean();
}

std::vector<double> frequency_grid(double f_lo_ghz, double f_hi_ghz, double step_ghz) {
    std::vector<double> f;
    const auto n = static_cast<long>(std::llround((f_hi_ghz - f_lo_ghz) / step_ghz));
    for (long i = 0; i <= n; ++i) f.push_back(f_lo_ghz + static_cast<double>(i) * step_ghz);
    return f;
}

namespace {

void check_nyquist(const LabWaveform& wave, const std::vector<double>& freqs) {
    const double nyquist = 0.5 * wave.sample_rate_per_ns;
    for (double f : freqs) {
        if (!(f > 0.0) || f > nyquist)
            throw RangeError("analysis frequency " + std::to_string(f) + " GHz outside (0, " +
                             std::to_string(nyquist) + "] GHz");
    }
}

Scalogram empty_scalogram(const LabWaveform& wave, const std::vector<double>& freqs, double cycles) {
    Scalogram s;
    s.freqs_ghz = freqs;
    s.cycles = cycles;
    s.times_ns.resize(wave.samples.size());
    for (std::size_t k = 0; k < wave.samples.size(); ++k) s.times_ns[k] = static_cast<double>(k) * wave.dt_ns();
    s.magnitude = RMat::Zero(static_cast<Eigen::Index>(freqs.size()), static_cast<Eigen::Index>(wave.samples.size()));
    return s;
}

double sigma_ns(double f_ghz, double cycles) { return cycles / (kTwoPi * f_ghz); }

// L2 normalization of exp(-t^2 / 2 sigma^2).
double morlet_norm(double sigma) { return 1.0 / std::sqrt(sigma * std::sqrt(kPi)); }

}  // namespace

Scalogram morlet_cwt(const LabWaveform& wave, const std::vector<double>& freqs_ghz, double cycles) {
    check_nyquist(wave, freqs_ghz);
    Scalogram s = empty_scalogram(wave, freqs_ghz, cycles);
    const std::size_t k_len = wave.samples.size();
    if (k_len == 0 || freqs_ghz.empty()) return s;
    const double dt = wave.dt_ns();
    double widest = 0.0;
    for (double f : freqs_ghz) widest = std::max(widest, sigma_ns(f, cycles));
    std::size_t m_len = 1;
    while (m_len < k_len + 2 * static_cast<std::size_t>(std::ceil(6.0 * widest / dt))) m_len *= 2;

    std::vector<cplx> padded(m_len, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < k_len; ++k) padded[k] = wave.samples[k];
    std::vector<cplx> spectrum;
    {
        Eigen::FFT<double> fft;
        fft.fwd(spectrum, padded);
    }

    const auto n_freq = static_cast<long>(freqs_ghz.size());
#pragma omp parallel
    {
        Eigen::FFT<double> fft;
        std::vector<cplx> product(m_len), coeffs;
#pragma omp for schedule(dynamic)
        for (long i = 0; i < n_freq; ++i) {
            const double f = freqs_ghz[static_cast<std::size_t>(i)];
            const double sigma = sigma_ns(f, cycles);
            const double amp = morlet_norm(sigma) * sigma * std::sqrt(kTwoPi);
            for (std::size_t m = 0; m < m_len; ++m) {
                const double idx = m <= m_len / 2 ? static_cast<double>(m)
                                                  : static_cast<double>(m) - static_cast<double>(m_len);
                const double nu = idx / (static_cast<double>(m_len) * dt);
                const double x = kPi * sigma * (nu - f);
                product[m] = spectrum[m] * (amp * std::exp(-2.0 * x * x));
            }
            fft.inv(coeffs, product);
            for (std::size_t k = 0; k < k_len; ++k) s.magnitude(i, static_cast<Eigen::Index>(k)) = std::abs(coeffs[k]);
        }
    }
    return s;
}

Scalogram morlet_cwt_reference(const LabWaveform& wave, const std::vector<double>& freqs_ghz, double cycles) {
    check_nyquist(wave, freqs_ghz);
    Scalogram s = empty_scalogram(wave, freqs_ghz, cycles);
    const auto k_len = static_cast<long>(wave.samples.size());
    const double dt = wave.dt_ns();
    for (std::size_t i = 0; i < freqs_ghz.size(); ++i) {
        const double f = freqs_ghz[i];
        const double sigma = sigma_ns(f, cycles);
        const double a = morlet_norm(sigma);
        const auto reach = static_cast<long>(std::ceil(6.0 * sigma / dt));
        std::vector<cplx> kernel(static_cast<std::size_t>(2 * reach + 1));
        for (long j = -reach; j <= reach; ++j) {
            const double tau = static_cast<double>(j) * dt;
            // conj(psi(tau)) times dt
            kernel[static_cast<std::size_t>(j + reach)] =
                a * dt * std::exp(-tau * tau / (2.0 * sigma * sigma)) * std::exp(-kI * (kTwoPi * f * tau));
        }
        for (long k = 0; k < k_len; ++k) {
            cplx acc{0.0, 0.0};
            for (long j = std::max(-reach, -k); j <= std::min(reach, k_len - 1 - k); ++j)
                acc += wave.samples[static_cast<std::size_t>(k + j)] * kernel[static_cast<std::size_t>(j + reach)];
            s.magnitude(static_cast<Eigen::Index>(i), k) = std::abs(acc);
        }
    }
    return s;
}

std::vector<std::size_t> peak_indices(const RVec& curve) {
    std::vector<std::size_t> peaks;
    const auto n = curve.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool left = i == 0 || curve[i] > curve[i - 1];
        const bool right = i + 1 == n || curve[i] >= curve[i + 1];
        if (left && right) peaks.push_back(static_cast<std::size_t>(i));
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [&](std::size_t a, std::size_t b) { return curve[static_cast<Eigen::Index>(a)] > curve[static_cast<Eigen::Index>(b)]; });
    return peaks;
}

}  // namespace qudit
