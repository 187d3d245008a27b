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

#include <string>
#include <vector>

#include "qudit/model.hpp"
#include "qudit/pulse.hpp"

namespace qudit {

/// Sampled evolution. Populations are frame invariant; density matrices and
/// propagators are reported in `frame`.
struct TrajectoryResult {
    std::vector<double> times_ns;
    std::vector<RVec> populations;
    std::vector<Mat> density;
    std::vector<Mat> propagators;
    PulseFrame frame = PulseFrame::rotating;
};

struct PropagationOptions {
    double record_interval_ns = 0.0;  // 0 records every propagation step
    int initial_level = 0;            // populations of U(t)|initial_level>
    bool keep_propagators = true;
};

/// Rotating-frame Hamiltonian at a given control value.
Mat rotating_hamiltonian(const RotatingFrame& frame, const ControlHamiltonians& hams, cplx xi);

/// Piecewise-constant time-ordered propagation U(t_{n+1}) = exp(-i H_n dt) U(t_n).
/// Throws RefineGridError when ||H_n|| dt >= 1 on any sample.
TrajectoryResult propagate_unitary(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                   const ControlPulse& pulse, const PropagationOptions& opts = {});

/// Final propagator U(T) only.
Mat gate_propagator(const RotatingFrame& frame, const ControlHamiltonians& hams,
                    const ControlPulse& pulse);

struct LabPropagationOptions {
    int substeps = 4;  // fourth-order Magnus steps per waveform sample
    double record_interval_ns = 0.0;
    int initial_level = 0;
    bool keep_propagators = false;
    int interpolation_half_width = 24;  // windowed-sinc taps on each side
};

/// Lab-frame evolution under H0 + s(t) (c + c^dag), no rotating-wave
/// approximation. s(t) is reconstructed between samples by band-limited
/// interpolation and integrated in the interaction picture of H0.
TrajectoryResult propagate_lab(const TransmonModel& model, const LabWaveform& wave,
                               const LabPropagationOptions& opts = {});

enum class DephasingSource { ramsey, echo };

struct CollapseOperator {
    Mat op;            // unit-normalized operator; jump operator is sqrt(rate) * op
    double rate = 0.0;  // 1/ns
    std::string label;
};

struct CollapseSet {
    std::vector<CollapseOperator> ops;
    bool empty() const { return ops.empty(); }
};

struct CollapseOptions {
    bool relaxation = true;
    bool dephasing = true;
    DephasingSource source = DephasingSource::ramsey;
};

/// Per-transition pure-dephasing rate 1/T2 - 1/(2 T1), in 1/us.
double pure_dephasing_rate_per_us(double t1_us, double t2_us);

/// Relaxation sqrt(1/T1)|k><k+1| per transition and diagonal dephasing
/// sqrt(2 g_k)|k><k| with level rates g_k chosen so each adjacent coherence
/// decays at its measured 1/T2.
CollapseSet collapse_operators(const DeviceSpec& spec, const CollapseOptions& opts = {});

struct LindbladOptions {
    int substeps = 4;            // integrator steps per control sample (step <= dt/4)
    double tolerance = 1e-11;    // per-sample step-halving error bound
    int max_refinements = 4;
    double record_interval_ns = 0.0;
    bool keep_density = false;
};

/// d rho/dt = -i[H(t), rho] + sum_L (L rho L^dag - {L^dag L, rho}/2) in the
/// rotating frame, integrated with an integrating-factor RK4 scheme that is
/// exact for the coherent part of each piecewise-constant sample.
TrajectoryResult lindblad_evolve(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                 const ControlPulse& pulse, const Mat& rho0,
                                 const CollapseSet& collapse, const LindbladOptions& opts = {});

/// One-gate Lindblad map as a d^2 x d^2 matrix acting on column-stacked rho.
/// Columns are integrated in parallel.
Mat gate_superoperator(const RotatingFrame& frame, const ControlHamiltonians& hams,
                       const ControlPulse& pulse, const CollapseSet& collapse,
                       const LindbladOptions& opts = {});

/// Serial reference for gate_superoperator.
Mat gate_superoperator_serial(const RotatingFrame& frame, const ControlHamiltonians& hams,
                              const ControlPulse& pulse, const CollapseSet& collapse,
                              const LindbladOptions& opts = {});

/// Populations after r = 0..n_reps back-to-back applications of the gate.
/// With `collapse == nullptr` the closed-system propagator is used.
std::vector<RVec> repeated_gate_trajectory(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                           const ControlPulse& pulse, int n_reps, const Mat& rho0,
                                           const CollapseSet* collapse,
                                           const LindbladOptions& opts = {});

/// Repeated application of a precomputed map (unitary or superoperator).
std::vector<RVec> repeat_unitary(const Mat& u, const Mat& rho0, int n_reps);
std::vector<RVec> repeat_superoperator(const Mat& s, const Mat& rho0, int n_reps);

Mat basis_density(int dim, int level);
RVec diagonal_populations(const Mat& rho);

}  // namespace qudit
