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
#include <vector>

#include "qudit/common.hpp"

namespace qudit {

enum class T2Kind { ramsey, echo };

/// Measured device parameters, one entry per adjacent transition (k, k+1).
/// Frequencies in GHz (f = w/2pi), times in microseconds.
struct DeviceSpec {
    int dim = 4;
    std::vector<double> transition_freqs_ghz;
    std::vector<double> t1_us;
    std::vector<double> t2_us;
    std::vector<T2Kind> t2_kind;
    /// Optional Ramsey decay estimates used in place of echo values for
    /// Lindblad runs. Empty, or one entry per transition (0 = not measured).
    std::vector<double> t2_ramsey_us;
    int guard_index = -1;  // -1 means dim - 1
    double readout_freq_ghz = 0.0;  // stored, unused in dynamics
    double chi_qc_mhz = 0.0;        // stored, unused in dynamics

    int guard() const { return guard_index < 0 ? dim - 1 : guard_index; }

    /// Throws InvalidSpecError naming the first violated invariant.
    void validate() const;
};

/// The four-level device characterized in the reference measurement.
DeviceSpec reference_device();

enum class ModelSource { spectrum, charge_fit };

struct ChargeFitInfo {
    double ej_ghz = 0.0;
    double ec_ghz = 0.0;
    double n_g = 0.0;
    int n_cut = 0;
    double residual_khz = 0.0;
    int iterations = 0;
};

/// Qudit eigenfrequencies plus the lowering operator in the eigenbasis.
///
/// `lower` is the matrix of c with c|k+1> ~ |k>, so its nonzero entries sit at
/// (row j, column k) with j < k. The 0-1 element lower(0, 1) is normalized to 1,
/// which makes the control amplitude a Rabi rate on the 0-1 transition.
struct TransmonModel {
    int dim = 0;
    RVec omega;  // rad/ns, omega[0] = 0
    Mat lower;
    ModelSource source = ModelSource::spectrum;
    std::optional<ChargeFitInfo> charge_fit;
    DeviceSpec device;

    Mat raise() const { return lower.adjoint(); }
    /// Drift Hamiltonian H0 = sum_k omega_k |k><k|.
    Mat drift() const;
};

struct RotatingFrame {
    double omega_d = 0.0;  // rad/ns
    RVec delta;            // delta[k] = omega[k] - k * omega_d
};

struct ControlHamiltonians {
    Mat h1;  // c + c^dag, multiplies Re(xi)
    Mat h2;  // -i (c - c^dag), multiplies Im(xi)
};

/// Harmonic-ladder model: omega from cumulative transition frequencies,
/// lower(k, k+1) = sqrt(k+1).
TransmonModel model_from_spectrum(const DeviceSpec& spec);

/// Cooper-pair-box model H = 4 Ec (n - ng)^2 - (Ej/2) sum(|n><n+1| + h.c.) on
/// charges -n_cut..n_cut, with (Ej, Ec) solved so the two lowest transitions
/// match the spec within 1 kHz. Drive matrix elements come from <j|n|k>.
TransmonModel fit_charge_model(const DeviceSpec& spec, int n_cut = 20, double n_g = 0.0);

/// Eigenvalues (GHz, ground shifted to zero) and eigenvectors of the charge
/// Hamiltonian; exposed for convergence studies.
struct ChargeSpectrum {
    RVec energies_ghz;
    RMat vectors;  // columns are eigenstates in the charge basis
};
ChargeSpectrum charge_spectrum(double ej_ghz, double ec_ghz, double n_g, int n_cut);

RotatingFrame rotating_frame(const TransmonModel& model, double omega_d);

/// Frame that co-rotates with the 0-1 transition (omega_d = omega_1).
inline RotatingFrame resonant_frame(const TransmonModel& model) {
    return rotating_frame(model, model.omega[1]);
}

ControlHamiltonians control_hamiltonians(const TransmonModel& model);

std::string to_string(ModelSource s);
std::string to_string(T2Kind k);

}  // namespace qudit
