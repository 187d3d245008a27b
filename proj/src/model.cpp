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

#include "qudit/model.hpp"

#include <cmath>
#include <sstream>

#include "qudit/errors.hpp"

namespace qudit {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidSpecError(msg);
}

bool positive_list(const std::vector<double>& v, bool allow_infinite = false) {
    for (double x : v)
        if (!(x > 0.0) || (!allow_infinite && std::isinf(x))) return false;
    return true;
}

}  // namespace

void DeviceSpec::validate() const {
    require(dim >= 2, "dim must be >= 2");
    const auto n = static_cast<std::size_t>(dim - 1);
    require(transition_freqs_ghz.size() == n, "transition_freqs_ghz must have dim-1 entries");
    require(t1_us.size() == n, "t1_us must have dim-1 entries");
    require(t2_us.size() == n, "t2_us must have dim-1 entries");
    require(t2_kind.size() == n, "t2_kind must have dim-1 entries");
    require(t2_ramsey_us.empty() || t2_ramsey_us.size() == n,
            "t2_ramsey_us must be empty or have dim-1 entries");
    require(positive_list(transition_freqs_ghz), "transition frequencies must be positive");
    require(positive_list(t1_us, true), "t1 times must be positive");
    require(positive_list(t2_us, true), "t2 times must be positive");
    for (double x : t2_ramsey_us) require(x >= 0.0, "t2_ramsey_us entries must be >= 0");
    require(guard() >= 0 && guard() < dim, "guard_index out of range");
}

DeviceSpec reference_device() {
    DeviceSpec s;
    s.dim = 4;
    s.transition_freqs_ghz = {4.09948, 3.87409, 3.61938};
    s.t1_us = {55.0, 26.0, 18.0};
    s.t2_us = {35.0, 13.0, 7.5};
    s.t2_kind = {T2Kind::ramsey, T2Kind::echo, T2Kind::echo};
    // Ramsey decay fitted before the onset of aliasing on the upper transitions.
    s.t2_ramsey_us = {35.0, 3.838, 0.224};
    s.guard_index = 3;
    s.readout_freq_ghz = 7.0768;
    s.chi_qc_mhz = 1.017;
    return s;
}

Mat TransmonModel::drift() const {
    Mat h = Mat::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) h(k, k) = omega[k];
    return h;
}

TransmonModel model_from_spectrum(const DeviceSpec& spec) {
    spec.validate();
    TransmonModel m;
    m.dim = spec.dim;
    m.device = spec;
    m.source = ModelSource::spectrum;
    m.omega = RVec::Zero(spec.dim);
    double acc = 0.0;
    for (int k = 1; k < spec.dim; ++k) {
        acc += spec.transition_freqs_ghz[k - 1];
        m.omega[k] = ghz_to_rad_per_ns(acc);
        if (!(m.omega[k] > m.omega[k - 1]))
            throw InvalidSpecError("cumulative level frequencies are not increasing");
    }
    m.lower = Mat::Zero(spec.dim, spec.dim);
    for (int k = 0; k + 1 < spec.dim; ++k) m.lower(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
    return m;
}

ChargeSpectrum charge_spectrum(double ej_ghz, double ec_ghz, double n_g, int n_cut) {
    const int size = 2 * n_cut + 1;
    RMat h = RMat::Zero(size, size);
    for (int i = 0; i < size; ++i) {
        const double n = static_cast<double>(i - n_cut) - n_g;
        h(i, i) = 4.0 * ec_ghz * n * n;
        if (i + 1 < size) {
            h(i, i + 1) = -0.5 * ej_ghz;
            h(i + 1, i) = -0.5 * ej_ghz;
        }
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(h);
    ChargeSpectrum out;
    out.energies_ghz = es.eigenvalues().array() - es.eigenvalues()[0];
    out.vectors = es.eigenvectors();
    return out;
}

TransmonModel fit_charge_model(const DeviceSpec& spec, int n_cut, double n_g) {
    spec.validate();
    if (n_cut < 10) throw InvalidSpecError("n_cut must be >= 10");
    const double f01 = spec.transition_freqs_ghz[0];
    if (spec.dim < 3) throw InvalidSpecError("charge fit needs at least two measured transitions");
    const double f12 = spec.transition_freqs_ghz[1];

    auto transitions = [&](double ej, double ec) {
        auto sp = charge_spectrum(ej, ec, n_g, n_cut);
        return Eigen::Vector2d(sp.energies_ghz[1] - sp.energies_ghz[0] - f01,
                               sp.energies_ghz[2] - sp.energies_ghz[1] - f12);
    };

    // Transmon asymptotics: f01 ~ sqrt(8 Ej Ec) - Ec, f12 - f01 ~ -Ec.
    double ec = std::max(f01 - f12, 1e-3);
    double ej = (f01 + ec) * (f01 + ec) / (8.0 * ec);
    Eigen::Vector2d r = transitions(ej, ec);
    const double tol_ghz = 1e-8;  // 10 Hz, well inside the 1 kHz contract
    int it = 0;
    for (; it < 100 && r.cwiseAbs().maxCoeff() > tol_ghz; ++it) {
        const double h = 1e-6;
        Eigen::Matrix2d jac;
        jac.col(0) = (transitions(ej + h, ec) - transitions(ej - h, ec)) / (2 * h);
        jac.col(1) = (transitions(ej, ec + h) - transitions(ej, ec - h)) / (2 * h);
        Eigen::Vector2d step = jac.fullPivLu().solve(-r);
        // Keep both energies positive; halve the step until the residual drops.
        double scale = 1.0;
        Eigen::Vector2d r_new;
        for (int ls = 0; ls < 30; ++ls) {
            const double ej_n = ej + scale * step[0];
            const double ec_n = ec + scale * step[1];
            if (ej_n > 0 && ec_n > 0) {
                r_new = transitions(ej_n, ec_n);
                if (r_new.norm() < r.norm()) {
                    ej = ej_n;
                    ec = ec_n;
                    break;
                }
            }
            scale *= 0.5;
        }
        if (scale < 1e-8) break;
        r = r_new;
    }
    const double residual_khz = r.cwiseAbs().maxCoeff() * 1e6;
    if (residual_khz > 1.0) {
        std::ostringstream os;
        os << "charge-model fit did not converge: residual " << residual_khz << " kHz";
        throw FitFailureError(os.str(), residual_khz);
    }

    const auto sp = charge_spectrum(ej, ec, n_g, n_cut);
    const auto sp_big = charge_spectrum(ej, ec, n_g, n_cut + 2);
    const int d = spec.dim;
    const double shift = (sp.energies_ghz.head(d) - sp_big.energies_ghz.head(d)).cwiseAbs().maxCoeff();
    if (shift > 1e-9) {
        std::ostringstream os;
        os << "charge basis n_cut=" << n_cut << " not converged: levels move " << shift * 1e9
           << " Hz when n_cut grows by 2";
        throw TruncationError(os.str());
    }

    // Charge operator in the eigenbasis, gauge-fixed so adjacent elements are positive.
    RMat vecs = sp.vectors.leftCols(d);
    RVec charges(2 * n_cut + 1);
    for (int i = 0; i < charges.size(); ++i) charges[i] = static_cast<double>(i - n_cut);
    RMat n_op = vecs.transpose() * charges.asDiagonal() * vecs;
    for (int k = 1; k < d; ++k) {
        if (n_op(k - 1, k) < 0) {
            vecs.col(k) *= -1.0;
            n_op = vecs.transpose() * charges.asDiagonal() * vecs;
        }
    }

    TransmonModel m;
    m.dim = d;
    m.device = spec;
    m.source = ModelSource::charge_fit;
    m.omega = RVec::Zero(d);
    for (int k = 1; k < d; ++k) m.omega[k] = ghz_to_rad_per_ns(sp.energies_ghz[k]);
    m.lower = Mat::Zero(d, d);
    const double norm = n_op(0, 1);
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) m.lower(j, k) = n_op(j, k) / norm;
    m.charge_fit = ChargeFitInfo{ej, ec, n_g, n_cut, residual_khz, it};
    return m;
}

RotatingFrame rotating_frame(const TransmonModel& model, double omega_d) {
    if (!(omega_d > 0.0)) throw InvalidSpecError("drive frequency must be positive");
    RotatingFrame f;
    f.omega_d = omega_d;
    f.delta.resize(model.dim);
    for (int k = 0; k < model.dim; ++k) f.delta[k] = model.omega[k] - k * omega_d;
    return f;
}

ControlHamiltonians control_hamiltonians(const TransmonModel& model) {
    const Mat& c = model.lower;
    return {c + c.adjoint(), -kI * (c - c.adjoint())};
}

std::string to_string(ModelSource s) { return s == ModelSource::spectrum ? "spectrum" : "charge_fit"; }
std::string to_string(T2Kind k) { return k == T2Kind::ramsey ? "ramsey" : "echo"; }

}  // namespace qudit
