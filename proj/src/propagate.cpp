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

#include "qudit/propagate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qudit/errors.hpp"
#include "qudit/linalg.hpp"
#include "qudit/waveform.hpp"

namespace qudit {

double ControlPulse::max_amplitude() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(s));
    return m;
}

ControlPulse refine(const ControlPulse& pulse, int factor) {
    ControlPulse out{pulse.dt_ns / factor, {}, pulse.frame};
    out.samples.reserve(pulse.samples.size() * factor);
    for (const auto& s : pulse.samples)
        for (int i = 0; i < factor; ++i) out.samples.push_back(s);
    return out;
}

Mat rotating_hamiltonian(const RotatingFrame& frame, const ControlHamiltonians& hams, cplx xi) {
    Mat h = xi.real() * hams.h1 + xi.imag() * hams.h2;
    h.diagonal() += frame.delta.cast<cplx>();
    return h;
}

namespace {

std::size_t record_stride(double interval, double dt) {
    if (interval <= 0.0) return 1;
    const auto m = static_cast<std::size_t>(std::llround(interval / dt));
    return std::max<std::size_t>(m, 1);
}

RVec column_populations(const Mat& u, int col) { return u.col(col).cwiseAbs2(); }

void check_span(const HermitianExp& e, std::size_t step) {
    if (e.phase_span() >= 1.0) {
        std::ostringstream os;
        os << "step " << step << ": ||H|| dt = " << e.phase_span() << " >= 1, refine the time grid";
        throw RefineGridError(os.str());
    }
}

}  // namespace

TrajectoryResult propagate_unitary(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                   const ControlPulse& pulse, const PropagationOptions& opts) {
    if (pulse.frame != PulseFrame::rotating)
        throw InvalidSpecError("propagate_unitary expects a rotating-frame pulse");
    const int d = static_cast<int>(frame.delta.size());
    const std::size_t stride = record_stride(opts.record_interval_ns, pulse.dt_ns);
    TrajectoryResult out;
    out.frame = PulseFrame::rotating;
    Mat u = Mat::Identity(d, d);
    auto record = [&](std::size_t n) {
        out.times_ns.push_back(static_cast<double>(n) * pulse.dt_ns);
        out.populations.push_back(column_populations(u, opts.initial_level));
        if (opts.keep_propagators) out.propagators.push_back(u);
    };
    record(0);
    const std::size_t n_steps = pulse.samples.size();
    for (std::size_t n = 0; n < n_steps; ++n) {
        const auto e = exp_minus_i(rotating_hamiltonian(frame, hams, pulse.samples[n]), pulse.dt_ns);
        check_span(e, n);
        u = e.value * u;
        if ((n + 1) % stride == 0 || n + 1 == n_steps) record(n + 1);
    }
    return out;
}

Mat gate_propagator(const RotatingFrame& frame, const ControlHamiltonians& hams,
                    const ControlPulse& pulse) {
    PropagationOptions opts;
    opts.record_interval_ns = pulse.gate_time_ns() + 1.0;
    auto traj = propagate_unitary(frame, hams, pulse, opts);
    return traj.propagators.back();
}

TrajectoryResult propagate_lab(const TransmonModel& model, const LabWaveform& wave,
                               const LabPropagationOptions& opts) {
    const int d = model.dim;
    const Mat hc = model.lower + model.lower.adjoint();
    const double dt = wave.dt_ns();
    const int m = std::max(opts.substeps, 1);
    const double h = dt / m;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const std::size_t stride = record_stride(opts.record_interval_ns, dt);

    // -i H_I(t) for the interaction picture of H0.
    auto generator = [&](double t) {
        const double s = interpolate_samples(wave.samples, t / dt, opts.interpolation_half_width);
        Mat a(d, d);
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                a(j, k) = -kI * s * hc(j, k) * std::exp(kI * ((model.omega[j] - model.omega[k]) * t));
        return a;
    };

    TrajectoryResult out;
    out.frame = PulseFrame::lab;
    Mat ui = Mat::Identity(d, d);
    auto record = [&](std::size_t n) {
        const double t = static_cast<double>(n) * dt;
        out.times_ns.push_back(t);
        out.populations.push_back(column_populations(ui, opts.initial_level));
        if (opts.keep_propagators) {
            Vec phase(d);
            for (int k = 0; k < d; ++k) phase[k] = std::exp(-kI * (model.omega[k] * t));
            out.propagators.push_back(phase.asDiagonal() * ui);
        }
    };
    record(0);
    const std::size_t n_samples = wave.samples.size();
    for (std::size_t n = 0; n < n_samples; ++n) {
        for (int sub = 0; sub < m; ++sub) {
            const double t0 = static_cast<double>(n) * dt + sub * h;
            const Mat a1 = generator(t0 + c1 * h);
            const Mat a2 = generator(t0 + c2 * h);
            const Mat omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
            // exp(Omega) with Omega anti-Hermitian: exp(-i K), K = i Omega.
            Mat k = kI * omega;
            k = 0.5 * (k + k.adjoint());
            const auto e = exp_minus_i(k, 1.0);
            check_span(e, n);
            ui = e.value * ui;
        }
        if ((n + 1) % stride == 0 || n + 1 == n_samples) record(n + 1);
    }
    return out;
}

double pure_dephasing_rate_per_us(double t1_us, double t2_us) {
    if (t2_us > 2.0 * t1_us) {
        std::ostringstream os;
        os << "T2 = " << t2_us << " us exceeds 2 T1 = " << 2.0 * t1_us << " us";
        throw InvalidCoherenceError(os.str());
    }
    const double inv_t1 = std::isinf(t1_us) ? 0.0 : 1.0 / t1_us;
    const double inv_t2 = std::isinf(t2_us) ? 0.0 : 1.0 / t2_us;
    return std::max(inv_t2 - 0.5 * inv_t1, 0.0);
}

CollapseSet collapse_operators(const DeviceSpec& spec, const CollapseOptions& opts) {
    spec.validate();
    const int d = spec.dim;
    CollapseSet set;
    if (opts.relaxation) {
        for (int k = 0; k + 1 < d; ++k) {
            if (std::isinf(spec.t1_us[k])) continue;
            CollapseOperator c;
            c.op = Mat::Zero(d, d);
            c.op(k, k + 1) = 1.0;
            c.rate = 1.0 / us_to_ns(spec.t1_us[k]);
            c.label = "relax_" + std::to_string(k + 1) + "_" + std::to_string(k);
            set.ops.push_back(std::move(c));
        }
    }
    if (opts.dephasing) {
        // Coherence (k, k+1) dephases at g_k + g_{k+1} with g_0 = 0.
        double previous = 0.0;
        for (int k = 0; k + 1 < d; ++k) {
            double t2 = spec.t2_us[k];
            if (opts.source == DephasingSource::ramsey && !spec.t2_ramsey_us.empty() &&
                spec.t2_ramsey_us[k] > 0.0)
                t2 = spec.t2_ramsey_us[k];
            const double transition = pure_dephasing_rate_per_us(spec.t1_us[k], t2);
            const double level = transition - previous;
            if (level < -1e-15) {
                std::ostringstream os;
                os << "level " << k + 1 << " would need a negative dephasing rate (" << level
                   << " /us) to reproduce the measured T2 of transition " << k << "-" << k + 1;
                throw InvalidCoherenceError(os.str());
            }
            previous = std::max(level, 0.0);
            if (previous == 0.0) continue;
            CollapseOperator c;
            c.op = Mat::Zero(d, d);
            c.op(k + 1, k + 1) = 1.0;
            c.rate = 2.0 * previous * 1e-3;  // 1/us -> 1/ns
            c.label = "dephase_" + std::to_string(k + 1);
            set.ops.push_back(std::move(c));
        }
    }
    return set;
}

Mat basis_density(int dim, int level) {
    Mat rho = Mat::Zero(dim, dim);
    rho(level, level) = 1.0;
    return rho;
}

RVec diagonal_populations(const Mat& rho) { return rho.diagonal().real(); }

std::vector<RVec> repeat_unitary(const Mat& u, const Mat& rho0, int n_reps) {
    std::vector<RVec> out;
    Mat rho = rho0;
    out.push_back(diagonal_populations(rho));
    for (int r = 0; r < n_reps; ++r) {
        rho = u * rho * u.adjoint();
        out.push_back(diagonal_populations(rho));
    }
    return out;
}

std::vector<RVec> repeat_superoperator(const Mat& s, const Mat& rho0, int n_reps) {
    const int d = static_cast<int>(rho0.rows());
    std::vector<RVec> out;
    Vec v = vectorize(rho0);
    out.push_back(diagonal_populations(rho0));
    for (int r = 0; r < n_reps; ++r) {
        v = s * v;
        out.push_back(diagonal_populations(unvectorize(v, d)));
    }
    return out;
}

}  // namespace qudit
