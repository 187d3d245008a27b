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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qudit/common.hpp"

namespace qudit {

inline constexpr int kProcessDim = 3;
inline constexpr int kBasisSize = kProcessDim * kProcessDim;

/// {I, Z01, Z12, X01, X12, Y01, Y12, X01 X12, X12 X01}, where P_ab is the Pauli
/// P on levels {a, b} and identity on the remaining level. The order is part of
/// the chi file format.
struct ProcessBasis {
    std::array<Mat, kBasisSize> elements;
    std::array<std::string, kBasisSize> labels;
    Mat gram;  // gram(m, n) = Tr(B_m^dag B_n)
};

const ProcessBasis& process_basis();

/// chi over process_basis(); E(rho) = sum_mn chi_mn B_m rho B_n^dag.
struct ProcessMatrix {
    Mat chi = Mat::Zero(kBasisSize, kBasisSize);

    /// max |sum_mn chi_mn B_n^dag B_m - I|.
    double tp_violation() const;
    double min_eigenvalue() const;
};

Mat apply_process(const ProcessMatrix& chi, const Mat& rho);

/// Rank-one chi = v v^dag with U = sum_n v_n B_n.
ProcessMatrix chi_from_unitary(const Mat& u);

/// 9 x 9 superoperator on column-stacked 3 x 3 matrices, and back.
Mat superoperator_from_chi(const ProcessMatrix& chi);
ProcessMatrix chi_from_superoperator(const Mat& s);

/// Choi matrix sum_mn chi_mn vec(B_m) vec(B_n)^dag, normalized to unit trace.
Mat normalized_choi(const ProcessMatrix& chi);

/// Uhlmann fidelity between the normalized Choi states of two processes.
double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b);

/// Population trajectories from |0>, |1>, |2>: [state][rep], rep 0 is the input.
using ProcessData = std::vector<std::vector<RVec>>;

ProcessData simulate_process_data(const ProcessMatrix& chi, int n_reps);

struct FitOptions {
    double tp_penalty = 1e3;
    double prior_weight = 1e-6;  // pull toward the target process along unobserved directions
    int max_iterations = 2000;
    double relative_tolerance = 1e-4;  // stop once an accepted step gains less than this fraction
    bool renormalize = true;           // rescale each population row to unit sum over the 3 levels
    double init_noise = 1e-3;
    std::uint64_t seed = 7;
    double identifiability_threshold = 1e6;  // Jacobian condition number
};

struct FitDiagnostics {
    double residual_sum_squares = 0.0;
    double residual_rms = 0.0;
    double tp_violation = 0.0;
    double jacobian_condition = 0.0;
    int jacobian_rank = 0;
    int parameters = 0;
    bool identifiability_warning = false;
    bool converged = false;
    int iterations = 0;
    std::string stop_reason;
};

struct FitResult {
    ProcessMatrix chi;
    FitDiagnostics diagnostics;
};

/// Least-squares fit of chi = 3 A A^dag / Tr(A A^dag Gram) (A square complex)
/// to repeated-application populations, with a trace-preservation penalty and
/// a weak pull toward chi_from_unitary(target). Starts from that process
/// perturbed by `init_noise` and fits growing prefixes of the sequence.
FitResult fit_chi(const ProcessData& measured, const Mat& target, const FitOptions& opts = {});

/// Entanglement fidelity sum_mn chi_mn Tr(U^dag B_m rho) Tr(rho B_n^dag U).
/// Throws NumericIntegrityError when the imaginary residual exceeds 1e-9.
double entanglement_fidelity(const ProcessMatrix& chi, const Mat& u, const Mat& rho);

/// <psi| U^dag E(|psi><psi|) U |psi>.
double gate_fidelity(const ProcessMatrix& chi, const Mat& u, const Vec& psi);

struct FidelityReport {
    std::array<double, kProcessDim> entanglement_by_level{};  // rho = |k><k|
    double entanglement_fidelity = 0.0;    // rho = I / d
    double average_gate_fidelity = 0.0;    // Haar Monte Carlo mean of gate_fidelity
    double standard_error = 0.0;
    double gate_fidelity_from_entanglement = 0.0;  // (d F_e + 1) / (d + 1)
    int samples = 0;
    std::uint64_t seed = 0;
    std::string method = "haar_monte_carlo";
};

/// Haar-random pure state on C^d from a seeded stream.
Vec haar_state(int d, std::uint64_t stream_seed);

/// Haar averages with per-sample seeded streams, parallel over samples and
/// summed in index order, so results do not depend on the thread count.
FidelityReport average_fidelities(const ProcessMatrix& chi, const Mat& u, int n_samples = 10000,
                                  std::uint64_t seed = 1);

/// Serial reference for average_fidelities.
FidelityReport average_fidelities_serial(const ProcessMatrix& chi, const Mat& u, int n_samples = 10000,
                                         std::uint64_t seed = 1);

/// Leading 3 x 3 block of a matrix, and the corresponding restriction of a
/// d-level superoperator (inputs and outputs on the computational levels).
Mat computational_block(const Mat& m);
Mat restrict_superoperator(const Mat& s, int d);

}  // namespace qudit
