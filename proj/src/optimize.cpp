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

#include "qudit/optimize.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <random>

#include <unsupported/Eigen/FFT>

#include "qudit/errors.hpp"
#include "qudit/lbfgs.hpp"
#include "qudit/propagate.hpp"

namespace qudit {

RVec taper_envelope(std::size_t n, double dt_ns, double ramp_ns, bool boundary_zero) {
    RVec w = RVec::Ones(static_cast<Eigen::Index>(n));
    if (!boundary_zero || n == 0) return w;
    const auto r = static_cast<std::size_t>(std::llround(ramp_ns / dt_ns));
    for (std::size_t k = 0; k < std::min(r, n); ++k) {
        const double s = std::sin(0.5 * kPi * static_cast<double>(k) / static_cast<double>(r));
        const double v = s * s;
        w[static_cast<Eigen::Index>(k)] = std::min(w[static_cast<Eigen::Index>(k)], v);
        w[static_cast<Eigen::Index>(n - 1 - k)] = std::min(w[static_cast<Eigen::Index>(n - 1 - k)], v);
    }
    w[0] = 0.0;
    w[static_cast<Eigen::Index>(n - 1)] = 0.0;
    return w;
}

ControlPulse constrain(const ControlPulse& pulse, const ObjectiveConfig& cfg) {
    ControlPulse out = pulse;
    const RVec w = taper_envelope(pulse.samples.size(), pulse.dt_ns, cfg.ramp_ns, cfg.boundary_zero);
    for (std::size_t n = 0; n < out.samples.size(); ++n) {
        const double limit = cfg.amplitude_cap * w[static_cast<Eigen::Index>(n)];
        const double a = std::abs(out.samples[n]);
        if (a <= limit) continue;
        cplx s = out.samples[n] * (limit / a);
        while (std::abs(s) > limit) s *= std::nextafter(1.0, 0.0);
        out.samples[n] = s;
    }
    return out;
}

namespace {

std::vector<cplx> lowpass(const std::vector<cplx>& z, double dt_ns, double f_max_ghz) {
    const std::size_t n = z.size();
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, z);
    for (std::size_t k = 0; k < n; ++k) {
        const double idx = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
        const double f = idx / (static_cast<double>(n) * dt_ns);
        if (std::abs(f) > f_max_ghz) spec[k] = 0.0;
    }
    std::vector<cplx> out;
    fft.inv(out, spec);
    return out;
}

}  // namespace

PulseParameterization::PulseParameterization(const ObjectiveConfig& cfg)
    : n_(cfg.num_samples()),
      dt_(cfg.dt_ns),
      cap_(cfg.amplitude_cap),
      f_max_ghz_(cfg.f_max_mhz * 1e-3),
      taper_(taper_envelope(cfg.num_samples(), cfg.dt_ns, cfg.ramp_ns, cfg.boundary_zero)) {
    if (n_ == 0) throw InvalidSpecError("gate time shorter than one control sample");
}

std::vector<cplx> PulseParameterization::complex_params(const RVec& x) const {
    std::vector<cplx> z(n_);
    for (std::size_t i = 0; i < n_; ++i) z[i] = cplx{x[2 * i], x[2 * i + 1]};
    return z;
}

std::vector<cplx> PulseParameterization::bandlimit(const std::vector<cplx>& z) const {
    if (f_max_ghz_ <= 0.0) return z;
    return lowpass(z, dt_, f_max_ghz_);
}

ControlPulse PulseParameterization::to_pulse(const RVec& x) const {
    const auto z = bandlimit(complex_params(x));
    ControlPulse p{dt_, std::vector<cplx>(n_), PulseFrame::rotating};
    for (std::size_t i = 0; i < n_; ++i)
        p.samples[i] = cap_ * taper_[static_cast<Eigen::Index>(i)] * z[i] / std::sqrt(1.0 + std::norm(z[i]));
    return p;
}

RVec PulseParameterization::pullback(const RVec& x, const std::vector<cplx>& grad_samples) const {
    const auto z = bandlimit(complex_params(x));
    std::vector<cplx> gz(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const double a = cap_ * taper_[static_cast<Eigen::Index>(i)];
        const double q = 1.0 + std::norm(z[i]);
        const double f = 1.0 / std::sqrt(q);
        const cplx g = grad_samples[i];
        // xi = a f(|z|) z  =>  grad_z = a f g - a q^{-3/2} Re(conj(g) z) z
        gz[i] = a * f * g - a * f / q * (std::conj(g) * z[i]).real() * z[i];
    }
    const auto gx = bandlimit(gz);  // the band projection is self-adjoint
    RVec out(2 * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        out[2 * i] = gx[i].real();
        out[2 * i + 1] = gx[i].imag();
    }
    return out;
}

namespace {

RVec random_start(const OptimizeConfig& cfg, int start) {
    const std::size_t n = cfg.objective.num_samples();
    std::mt19937_64 rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(start)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> z(n);
    for (auto& v : z) {
        const double re = normal(rng);
        const double im = normal(rng);
        v = cplx{re, im};
    }
    z = lowpass(z, cfg.objective.dt_ns, cfg.init_bandwidth_mhz * 1e-3);
    double rms = 0.0;
    for (const auto& v : z) rms += std::norm(v);
    rms = std::sqrt(rms / static_cast<double>(n));
    const double scale = rms > 0.0 ? cfg.init_amplitude / rms : 0.0;
    RVec x(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        x[2 * i] = z[i].real() * scale;
        x[2 * i + 1] = z[i].imag() * scale;
    }
    return x;
}

// Inverse of the saturating map where the taper is nonzero.
RVec params_from_pulse(const ControlPulse& pulse, const ObjectiveConfig& cfg) {
    const RVec w = taper_envelope(pulse.samples.size(), pulse.dt_ns, cfg.ramp_ns, cfg.boundary_zero);
    RVec x = RVec::Zero(2 * static_cast<Eigen::Index>(pulse.samples.size()));
    for (std::size_t i = 0; i < pulse.samples.size(); ++i) {
        const double a = cfg.amplitude_cap * w[static_cast<Eigen::Index>(i)];
        if (a <= 0.0) continue;
        cplx r = pulse.samples[i] / a;
        const double m = std::min(std::abs(r), 0.99);
        if (std::abs(r) > 0.0) r *= m / std::abs(r);
        const cplx z = r / std::sqrt(1.0 - m * m);
        x[2 * i] = z.real();
        x[2 * i + 1] = z.imag();
    }
    return x;
}

struct StartOutcome {
    RVec x;
    StartSummary summary;
    std::vector<IterationRecord> trace;
};

StartOutcome run_start(const RotatingFrame& frame, const ControlHamiltonians& hams, const Mat& target_rot,
                       const OptimizeConfig& cfg, const PulseParameterization& param, int start, RVec x0) {
    ObjectiveValue last;
    auto fn = [&](const RVec& x, RVec& grad) {
        const auto pulse = param.to_pulse(x);
        const auto og = objective_gradient(frame, hams, pulse, target_rot, cfg.objective);
        grad = param.pullback(x, og.grad);
        last = og.value;
        return og.value.g;
    };
    StartOutcome out;
    ObjectiveValue accepted;
    auto on_iter = [&](int it, double, const RVec&, const RVec& grad) {
        accepted = last;
        out.trace.push_back(IterationRecord{start, it, last.g, last.fg, last.leakage, grad.norm()});
        return true;
    };
    LbfgsOptions lo;
    lo.max_iterations = cfg.max_iterations;
    lo.memory = cfg.lbfgs_memory;
    lo.gradient_tolerance = cfg.gradient_tolerance;
    auto res = lbfgs_minimize(fn, std::move(x0), lo, on_iter);
    // Re-evaluate at the returned point so the summary matches the pulse exactly.
    const auto final_value = evaluate_pulse(frame, hams, param.to_pulse(res.x), target_rot, cfg.objective);
    out.summary = StartSummary{start, final_value.g, final_value.fg, final_value.leakage,
                               res.iterations, res.evaluations, res.stop_reason};
    out.x = std::move(res.x);
    return out;
}

std::pair<ControlPulse, OptimizationReport> optimize_impl(const TransmonModel& model, const RotatingFrame& frame,
                                                          const TargetGate& target, const OptimizeConfig& cfg,
                                                          const std::optional<ControlPulse>& init, bool parallel) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.starts < 1) throw InvalidSpecError("starts must be >= 1");
    if (target.matrix.rows() != model.dim) throw InvalidSpecError("target dimension differs from model");
    if (unitarity_deviation(target.matrix) > 1e-12) throw InvalidSpecError("target gate is not unitary");
    ObjectiveConfig ocfg = cfg.objective;
    ocfg.computational_dim = target.computational_dim;
    OptimizeConfig local = cfg;
    local.objective = ocfg;

    const auto hams = control_hamiltonians(model);
    const Mat target_rot = rotate_target(target, frame, ocfg.gate_time_ns);
    const PulseParameterization param(ocfg);

    OptimizationReport report;
    if (cfg.self_check) {
        // Short prefix keeps the finite-difference check cheap.
        ControlPulse probe = param.to_pulse(random_start(local, 0));
        probe.samples.resize(std::min<std::size_t>(probe.samples.size(), 24));
        for (auto& s : probe.samples) s += cplx{0.3, -0.2} * ocfg.amplitude_cap;
        report.gradient_check_residual = check_gradient(frame, hams, probe, target_rot, ocfg);
    }

    std::vector<StartOutcome> outcomes(static_cast<std::size_t>(cfg.starts));
    std::exception_ptr failure;
    auto work = [&](int s) {
        RVec x0 = (s == 0 && init) ? params_from_pulse(*init, ocfg) : random_start(local, s);
        outcomes[static_cast<std::size_t>(s)] = run_start(frame, hams, target_rot, local, param, s, std::move(x0));
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < cfg.starts; ++s) {
            try {
                work(s);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (int s = 0; s < cfg.starts; ++s) work(s);
    }

    int best = 0;
    for (int s = 1; s < cfg.starts; ++s)
        if (outcomes[s].summary.g < outcomes[best].summary.g) best = s;
    for (auto& o : outcomes) {
        report.starts.push_back(o.summary);
        report.trace.insert(report.trace.end(), o.trace.begin(), o.trace.end());
    }
    report.best_start = best;
    report.g = outcomes[best].summary.g;
    report.fg = outcomes[best].summary.fg;
    report.leakage = outcomes[best].summary.leakage;
    report.converged = report.fg >= cfg.fg_threshold;
    ControlPulse pulse = constrain(param.to_pulse(outcomes[best].x), ocfg);
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(pulse), std::move(report)};
}

}  // namespace

std::pair<ControlPulse, OptimizationReport> optimize_pulse(const TransmonModel& model, const RotatingFrame& frame,
                                                           const TargetGate& target, const OptimizeConfig& cfg,
                                                           const std::optional<ControlPulse>& init) {
    return optimize_impl(model, frame, target, cfg, init, true);
}

std::pair<ControlPulse, OptimizationReport> optimize_pulse_serial(const TransmonModel& model,
                                                                  const RotatingFrame& frame,
                                                                  const TargetGate& target,
                                                                  const OptimizeConfig& cfg,
                                                                  const std::optional<ControlPulse>& init) {
    return optimize_impl(model, frame, target, cfg, init, false);
}

}  // namespace qudit
