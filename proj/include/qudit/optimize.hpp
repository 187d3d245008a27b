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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qudit/model.hpp"
#include "qudit/pulse.hpp"

namespace qudit {

/// Target unitary; fidelity is evaluated on the leading `computational_dim` levels.
struct TargetGate {
    Mat matrix;
    int computational_dim = 3;
    std::string label;
};

/// |0><2| + |2><0| with identity on every other level.
TargetGate swap02_gate(int dim, int computational_dim = 3);
TargetGate identity_gate(int dim, int computational_dim = 3);
/// diag(exp(-i omega_k T)): the undriven evolution. Its rotated form is
/// diag(exp(-i delta_k T)), which the zero pulse reproduces exactly.
TargetGate free_evolution_gate(const RotatingFrame& frame, double gate_time_ns, int computational_dim = 3);

struct ObjectiveConfig {
    RVec guard_weights;          // diagonal of W
    double leakage_weight = 1.0;
    double amplitude_cap = mhz_to_rad_per_ns(6.0);
    bool boundary_zero = true;
    double ramp_ns = 2.0;        // cosine taper length at each edge
    double dt_ns = 0.125;
    double gate_time_ns = 150.0;
    double f_max_mhz = 500.0;    // envelope band limit; <= 0 disables it
    int computational_dim = 3;

    std::size_t num_samples() const;
};

/// W = diag(0, ..., 0, 1) on the guard level.
ObjectiveConfig default_objective_config(int dim);

/// R(T) U R^dag(0) with R(t) = exp(i omega_d t sum_k k|k><k|).
Mat rotate_target(const TargetGate& target, const RotatingFrame& frame, double gate_time_ns);

struct ObjectiveValue {
    double g = 0.0;
    double fg = 0.0;
    double leakage = 0.0;
};

/// G = (1 - Fg^2) + leakage_weight * (1/T) int Tr(P U^dag W U P) dt, with
/// Fg = |Tr(P U_targ^dag U(T) P)| / d_c. `trajectory` holds U(n dt), n = 0..N.
ObjectiveValue objective(const std::vector<Mat>& trajectory, const Mat& target_rot,
                         const ObjectiveConfig& cfg);

/// Objective of a pulse by fresh propagation.
ObjectiveValue evaluate_pulse(const RotatingFrame& frame, const ControlHamiltonians& hams,
                              const ControlPulse& pulse, const Mat& target_rot,
                              const ObjectiveConfig& cfg);

struct ObjectiveGradient {
    ObjectiveValue value;
    /// dG/dRe(xi_n) + i dG/dIm(xi_n) for every control sample.
    std::vector<cplx> grad;
};

/// Analytic gradient by a backward adjoint sweep over the step propagators.
ObjectiveGradient objective_gradient(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                     const ControlPulse& pulse, const Mat& target_rot,
                                     const ObjectiveConfig& cfg);

/// Central differences on every sample, for self checks.
std::vector<cplx> finite_difference_gradient(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                             const ControlPulse& pulse, const Mat& target_rot,
                                             const ObjectiveConfig& cfg, double step = 1e-6);

/// ||a - b|| / max(||b||, tiny), treating the samples as one real vector.
double gradient_relative_error(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Compares analytic and finite-difference gradients; throws
/// GradientIntegrityError when the relative error exceeds `limit`.
double check_gradient(const RotatingFrame& frame, const ControlHamiltonians& hams,
                      const ControlPulse& pulse, const Mat& target_rot, const ObjectiveConfig& cfg,
                      double limit = 1e-4);

/// Cosine-ramp amplitude envelope in [0, 1] over the control grid.
RVec taper_envelope(std::size_t n, double dt_ns, double ramp_ns, bool boundary_zero);

/// Clamps |xi_n| to cap * taper_n, preserving phase. Idempotent.
ControlPulse constrain(const ControlPulse& pulse, const ObjectiveConfig& cfg);

/// Maps unconstrained reals x (2N) to a pulse:
///   z = bandlimit(x), xi_n = cap * taper_n * z_n / sqrt(1 + |z_n|^2).
/// Every image already satisfies the cap and boundary constraints.
class PulseParameterization {
  public:
    explicit PulseParameterization(const ObjectiveConfig& cfg);

    std::size_t num_parameters() const { return 2 * n_; }
    ControlPulse to_pulse(const RVec& x) const;
    /// Gradient with respect to x given the gradient with respect to the samples.
    RVec pullback(const RVec& x, const std::vector<cplx>& grad_samples) const;
    /// Orthogonal projection onto the allowed envelope band.
    std::vector<cplx> bandlimit(const std::vector<cplx>& z) const;

  private:
    std::vector<cplx> complex_params(const RVec& x) const;

    std::size_t n_;
    double dt_;
    double cap_;
    double f_max_ghz_;
    RVec taper_;
};

struct OptimizeConfig {
    ObjectiveConfig objective;
    int starts = 4;
    std::uint64_t seed = 1;
    int max_iterations = 800;
    double fg_threshold = 0.999;
    double init_amplitude = 0.05;  // fraction of the cap
    double init_bandwidth_mhz = 100.0;
    double gradient_tolerance = 1e-10;
    int lbfgs_memory = 20;
    bool self_check = true;  // finite-difference check on a short prefix at start
};

struct IterationRecord {
    int start = 0;
    int iteration = 0;
    double g = 0.0;
    double fg = 0.0;
    double leakage = 0.0;
    double grad_norm = 0.0;
};

struct StartSummary {
    int start = 0;
    double g = 0.0;
    double fg = 0.0;
    double leakage = 0.0;
    int iterations = 0;
    int evaluations = 0;
    std::string stop_reason;
};

struct OptimizationReport {
    double g = 0.0;
    double fg = 0.0;
    double leakage = 0.0;
    bool converged = false;  // best start reached fg_threshold
    int best_start = -1;
    std::vector<StartSummary> starts;
    std::vector<IterationRecord> trace;
    double gradient_check_residual = 0.0;
    double wall_time_s = 0.0;  // diagnostics only; not part of exported reports
};

/// Multi-start quasi-Newton search. Starts run in parallel; the result is the
/// lowest-G start (ties to the lower index), independent of thread count.
/// `init` replaces the random start 0 with an explicit envelope.
std::pair<ControlPulse, OptimizationReport> optimize_pulse(const TransmonModel& model,
                                                           const RotatingFrame& frame,
                                                           const TargetGate& target,
                                                           const OptimizeConfig& cfg,
                                                           const std::optional<ControlPulse>& init = {});

/// Same search with starts run one after another.
std::pair<ControlPulse, OptimizationReport> optimize_pulse_serial(const TransmonModel& model,
                                                                  const RotatingFrame& frame,
                                                                  const TargetGate& target,
                                                                  const OptimizeConfig& cfg,
                                                                  const std::optional<ControlPulse>& init = {});

}  // namespace qudit
