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

#include <cmath>

#include "qudit/errors.hpp"
#include "qudit/linalg.hpp"
#include "qudit/optimize.hpp"
#include "qudit/propagate.hpp"

namespace qudit {

TargetGate swap02_gate(int dim, int computational_dim) {
    if (dim < 3) throw InvalidSpecError("swap02 needs at least three levels");
    Mat u = Mat::Identity(dim, dim);
    u(0, 0) = 0.0;
    u(2, 2) = 0.0;
    u(0, 2) = 1.0;
    u(2, 0) = 1.0;
    return {u, computational_dim, "swap02"};
}

TargetGate identity_gate(int dim, int computational_dim) {
    return {Mat::Identity(dim, dim), computational_dim, "identity"};
}

TargetGate free_evolution_gate(const RotatingFrame& frame, double gate_time_ns, int computational_dim) {
    const auto d = frame.delta.size();
    Mat u = Mat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
        u(k, k) = std::exp(-kI * ((frame.delta[k] + static_cast<double>(k) * frame.omega_d) * gate_time_ns));
    return {u, computational_dim, "free_evolution"};
}

std::size_t ObjectiveConfig::num_samples() const {
    return static_cast<std::size_t>(std::llround(gate_time_ns / dt_ns));
}

ObjectiveConfig default_objective_config(int dim) {
    ObjectiveConfig cfg;
    cfg.guard_weights = RVec::Zero(dim);
    cfg.guard_weights[dim - 1] = 1.0;
    return cfg;
}

Mat rotate_target(const TargetGate& target, const RotatingFrame& frame, double gate_time_ns) {
    const auto d = target.matrix.rows();
    Vec phase(d);
    for (Eigen::Index k = 0; k < d; ++k)
        phase[k] = std::exp(kI * (static_cast<double>(k) * frame.omega_d * gate_time_ns));
    return phase.asDiagonal() * target.matrix;
}

namespace {

void check_config(const ObjectiveConfig& cfg, Eigen::Index d) {
    if (cfg.guard_weights.size() != d) throw InvalidSpecError("guard_weights must have one entry per level");
    if ((cfg.guard_weights.array() < 0.0).any()) throw InvalidSpecError("guard weights must be >= 0");
    if (cfg.computational_dim < 1 || cfg.computational_dim > d)
        throw InvalidSpecError("computational_dim must lie in [1, dim]");
}

// Tr(P U^dag W U P) restricted to computational columns.
double guard_occupation(const Mat& u, const RVec& w, int dc) {
    double acc = 0.0;
    for (int c = 0; c < dc; ++c)
        for (Eigen::Index k = 0; k < u.rows(); ++k) acc += w[k] * std::norm(u(k, c));
    return acc;
}

cplx projected_overlap(const Mat& target_rot, const Mat& u, int dc) {
    cplx t{0.0, 0.0};
    for (int i = 0; i < dc; ++i) t += target_rot.col(i).dot(u.col(i));  // (U_targ^dag U)_ii
    return t;
}

double trapezoid_weight(std::size_t m, std::size_t n_steps, double dt) {
    return (m == 0 || m == n_steps) ? 0.5 * dt : dt;
}

}  // namespace

ObjectiveValue objective(const std::vector<Mat>& trajectory, const Mat& target_rot, const ObjectiveConfig& cfg) {
    check_config(cfg, target_rot.rows());
    const int dc = cfg.computational_dim;
    const std::size_t n_steps = trajectory.size() - 1;
    const double total = cfg.dt_ns * static_cast<double>(n_steps);
    ObjectiveValue v;
    v.fg = std::abs(projected_overlap(target_rot, trajectory.back(), dc)) / dc;
    double integral = 0.0;
    for (std::size_t m = 0; m <= n_steps; ++m)
        integral += trapezoid_weight(m, n_steps, cfg.dt_ns) * guard_occupation(trajectory[m], cfg.guard_weights, dc);
    v.leakage = n_steps == 0 ? 0.0 : integral / total;
    v.g = (1.0 - v.fg * v.fg) + cfg.leakage_weight * v.leakage;
    return v;
}

ObjectiveValue evaluate_pulse(const RotatingFrame& frame, const ControlHamiltonians& hams,
                              const ControlPulse& pulse, const Mat& target_rot, const ObjectiveConfig& cfg) {
    ObjectiveConfig local = cfg;
    local.dt_ns = pulse.dt_ns;
    auto traj = propagate_unitary(frame, hams, pulse);
    return objective(traj.propagators, target_rot, local);
}

ObjectiveGradient objective_gradient(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                     const ControlPulse& pulse, const Mat& target_rot,
                                     const ObjectiveConfig& cfg) {
    const Eigen::Index d = frame.delta.size();
    check_config(cfg, d);
    const int dc = cfg.computational_dim;
    const std::size_t n_steps = pulse.samples.size();
    const double dt = pulse.dt_ns;
    const double total = dt * static_cast<double>(n_steps);

    // Forward sweep, keeping every factorization for the backward pass.
    std::vector<HermitianExp> steps;
    steps.reserve(n_steps);
    std::vector<Mat> u(n_steps + 1);
    u[0] = Mat::Identity(d, d);
    double integral = trapezoid_weight(0, n_steps, dt) * guard_occupation(u[0], cfg.guard_weights, dc);
    for (std::size_t n = 0; n < n_steps; ++n) {
        steps.push_back(exp_minus_i(rotating_hamiltonian(frame, hams, pulse.samples[n]), dt));
        if (steps.back().phase_span() >= 1.0) throw RefineGridError("||H|| dt >= 1 in gradient sweep");
        u[n + 1] = steps.back().value * u[n];
        integral += trapezoid_weight(n + 1, n_steps, dt) * guard_occupation(u[n + 1], cfg.guard_weights, dc);
    }
    const cplx overlap = projected_overlap(target_rot, u[n_steps], dc);
    ObjectiveGradient out;
    out.value.fg = std::abs(overlap) / dc;
    out.value.leakage = integral / total;
    out.value.g = (1.0 - out.value.fg * out.value.fg) + cfg.leakage_weight * out.value.leakage;

    // Backward sweep. b accumulates the adjoint of both terms:
    //   b_N = -(2/dc^2) T (P U_targ^dag)^dag + c w_N W U_N P,
    //   b_{n-1} = E_n^dag b_n + c w_{n-1} W U_{n-1} P,   c = 2 lambda / T_g.
    Mat proj = Mat::Zero(d, d);
    for (int i = 0; i < dc; ++i) proj(i, i) = 1.0;
    const Mat w = cfg.guard_weights.cast<cplx>().asDiagonal();
    const double c_leak = 2.0 * cfg.leakage_weight / total;
    const cplx c_fid = -2.0 / (static_cast<double>(dc) * dc) * overlap;
    Mat b = c_fid * (target_rot * proj) + c_leak * trapezoid_weight(n_steps, n_steps, dt) * w * u[n_steps] * proj;

    out.grad.assign(n_steps, cplx{0.0, 0.0});
    for (std::size_t n = n_steps; n-- > 0;) {
        const HermitianExp& e = steps[n];
        // dG/du_j = Re Tr(b^dag dE_j U_n) = Re sum_jk C_kj X_jk, with C = V^dag U_n b^dag V.
        const Mat cmat = e.vectors.adjoint() * u[n] * b.adjoint() * e.vectors;
        double grads[2];
        const Mat* dirs[2] = {&hams.h1, &hams.h2};
        for (int j = 0; j < 2; ++j) {
            Mat x = e.vectors.adjoint() * (*dirs[j]) * e.vectors;
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index s = 0; s < d; ++s) {
                    const double half = 0.5 * (e.values[r] - e.values[s]) * dt;
                    const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
                    x(r, s) *= -kI * dt * std::exp(-kI * (0.5 * (e.values[r] + e.values[s]) * dt)) * sinc;
                }
            }
            grads[j] = (cmat.transpose().cwiseProduct(x)).sum().real();
        }
        out.grad[n] = cplx{grads[0], grads[1]};
        b = e.value.adjoint() * b;
        if (n > 0) b += c_leak * trapezoid_weight(n, n_steps, dt) * w * u[n] * proj;
    }
    return out;
}

std::vector<cplx> finite_difference_gradient(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                             const ControlPulse& pulse, const Mat& target_rot,
                                             const ObjectiveConfig& cfg, double step) {
    std::vector<cplx> grad(pulse.samples.size());
    ControlPulse probe = pulse;
    for (std::size_t n = 0; n < pulse.samples.size(); ++n) {
        double parts[2];
        for (int j = 0; j < 2; ++j) {
            const cplx delta = j == 0 ? cplx{step, 0.0} : cplx{0.0, step};
            probe.samples[n] = pulse.samples[n] + delta;
            const double gp = evaluate_pulse(frame, hams, probe, target_rot, cfg).g;
            probe.samples[n] = pulse.samples[n] - delta;
            const double gm = evaluate_pulse(frame, hams, probe, target_rot, cfg).g;
            probe.samples[n] = pulse.samples[n];
            parts[j] = (gp - gm) / (2.0 * step);
        }
        grad[n] = cplx{parts[0], parts[1]};
    }
    return grad;
}

double gradient_relative_error(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

double check_gradient(const RotatingFrame& frame, const ControlHamiltonians& hams, const ControlPulse& pulse,
                      const Mat& target_rot, const ObjectiveConfig& cfg, double limit) {
    const auto analytic = objective_gradient(frame, hams, pulse, target_rot, cfg).grad;
    const auto numeric = finite_difference_gradient(frame, hams, pulse, target_rot, cfg);
    const double err = gradient_relative_error(analytic, numeric);
    if (!(err <= limit))
        throw GradientIntegrityError("analytic gradient disagrees with finite differences (relative error " +
                                         std::to_string(err) + ")",
                                     err);
    return err;
}

}  // namespace qudit
