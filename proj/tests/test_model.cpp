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

#include <gtest/gtest.h>

#include "qudit/errors.hpp"
#include "qudit/model.hpp"

using namespace qudit;

namespace {

double transition_ghz(const TransmonModel& m, int k) { return rad_per_ns_to_ghz(m.omega[k + 1] - m.omega[k]); }

}  // namespace

TEST(Model, SpectrumLevelsFromCumulativeTransitions) {
    const TransmonModel m = model_from_spectrum(reference_device());
    ASSERT_EQ(m.dim, 4);
    EXPECT_EQ(m.omega[0], 0.0);
    EXPECT_NEAR(rad_per_ns_to_ghz(m.omega[1]), 4.09948, 1e-12);
    EXPECT_NEAR(rad_per_ns_to_ghz(m.omega[2]), 7.97357, 1e-12);
    EXPECT_NEAR(rad_per_ns_to_ghz(m.omega[3]), 11.59295, 1e-12);
    for (int k = 1; k < m.dim; ++k) EXPECT_GT(m.omega[k], m.omega[k - 1]);
}

TEST(Model, LadderLoweringOperator) {
    const TransmonModel m = model_from_spectrum(reference_device());
    EXPECT_EQ(m.lower(0, 1), cplx(1.0, 0.0));
    EXPECT_NEAR(std::abs(m.lower(1, 2) - std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.lower(2, 3) - std::sqrt(3.0)), 0.0, 1e-15);
    for (int r = 0; r < m.dim; ++r)
        for (int c = 0; c < m.dim; ++c)
            if (c != r + 1) {
                EXPECT_EQ(m.lower(r, c), cplx(0.0, 0.0));
            }
}

TEST(Model, RotatingFrameDetunings) {
    const TransmonModel m = model_from_spectrum(reference_device());
    const RotatingFrame f = resonant_frame(m);
    EXPECT_EQ(f.delta[0], 0.0);
    EXPECT_NEAR(f.delta[1], 0.0, 1e-15);
    EXPECT_NEAR(rad_per_ns_to_mhz(f.delta[2]), 3874.09 - 4099.48, 1e-6);
    EXPECT_NEAR(rad_per_ns_to_mhz(f.delta[2]), -225.39, 1e-6);
    EXPECT_NEAR(rad_per_ns_to_mhz(f.delta[3]), (3874.09 - 4099.48) + (3619.38 - 4099.48), 1e-6);
    EXPECT_NEAR(rad_per_ns_to_mhz(f.delta[3]), -705.49, 1e-6);
}

TEST(Model, DetuningIdentityIsExact) {
    const TransmonModel m = model_from_spectrum(reference_device());
    for (double wd : {0.5, 25.757, 26.0, 31.4}) {
        const RotatingFrame f = rotating_frame(m, wd);
        EXPECT_EQ(f.omega_d, wd);
        for (int k = 0; k < m.dim; ++k) EXPECT_EQ(f.delta[k], m.omega[k] - k * wd);
    }
}

TEST(Model, ControlHamiltoniansAreHermitianAndNonCommuting) {
    for (const TransmonModel& m : {model_from_spectrum(reference_device()), fit_charge_model(reference_device())}) {
        const ControlHamiltonians h = control_hamiltonians(m);
        EXPECT_EQ(hermiticity_deviation(h.h1), 0.0);
        EXPECT_EQ(hermiticity_deviation(h.h2), 0.0);
        EXPECT_GT(max_abs(h.h1 * h.h2 - h.h2 * h.h1), 0.1);
    }
    const ControlHamiltonians h = control_hamiltonians(model_from_spectrum(reference_device()));
    EXPECT_EQ(h.h1(0, 1), cplx(1.0, 0.0));
    EXPECT_EQ(h.h1(1, 0), cplx(1.0, 0.0));
    EXPECT_EQ(h.h2(1, 0), cplx(0.0, 1.0));
    EXPECT_EQ(h.h2(0, 1), cplx(0.0, -1.0));
}

TEST(Model, SpecValidation) {
    DeviceSpec s = reference_device();
    EXPECT_NO_THROW(s.validate());
    s.dim = 1;
    EXPECT_THROW(s.validate(), InvalidSpecError);
    s = reference_device();
    s.t1_us.pop_back();
    EXPECT_THROW(s.validate(), InvalidSpecError);
    s = reference_device();
    s.transition_freqs_ghz[1] = -1.0;
    EXPECT_THROW(s.validate(), InvalidSpecError);
    s = reference_device();
    s.t2_us[0] = 0.0;
    EXPECT_THROW(s.validate(), InvalidSpecError);
    s = reference_device();
    s.guard_index = 7;
    EXPECT_THROW(s.validate(), InvalidSpecError);
    s = reference_device();
    s.guard_index = -1;
    EXPECT_EQ(s.guard(), 3);
}

TEST(Model, NonMonotoneLevelsRejected) {
    DeviceSpec s = reference_device();
    s.transition_freqs_ghz = {4.0, 0.0, 3.0};
    EXPECT_THROW(model_from_spectrum(s), InvalidSpecError);
}

TEST(ChargeModel, ReproducesMeasuredTransitions) {
    const DeviceSpec spec = reference_device();
    const TransmonModel m = fit_charge_model(spec);
    ASSERT_TRUE(m.charge_fit.has_value());
    EXPECT_EQ(m.source, ModelSource::charge_fit);
    EXPECT_NEAR(transition_ghz(m, 0), 4.09948, 1e-6);
    EXPECT_NEAR(transition_ghz(m, 1), 3.87409, 1e-6);
    EXPECT_NEAR((transition_ghz(m, 0) - transition_ghz(m, 1)) * 1e3, 225.39, 1e-3);
    EXPECT_EQ(m.omega[0], 0.0);
    EXPECT_EQ(m.lower(0, 1), cplx(1.0, 0.0));
    EXPECT_LT(m.charge_fit->residual_khz, 1.0);
}

TEST(ChargeModel, IndependentDiagonalizationAgrees) {
    const TransmonModel m = fit_charge_model(reference_device());
    const auto& c = *m.charge_fit;
    // Rebuild the Cooper-pair-box Hamiltonian from the fitted parameters.
    const int n = 2 * c.n_cut + 1;
    RMat h = RMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double q = (i - c.n_cut) - c.n_g;
        h(i, i) = 4.0 * c.ec_ghz * q * q;
        if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = -c.ej_ghz / 2.0;
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(h);
    const RVec e = es.eigenvalues();
    EXPECT_NEAR(e[1] - e[0], 4.09948, 1e-6);
    EXPECT_NEAR(e[2] - e[1], 3.87409, 1e-6);
    for (int k = 1; k < m.dim; ++k) EXPECT_NEAR(rad_per_ns_to_ghz(m.omega[k]), e[k] - e[0], 1e-9);

    // Drive elements are |<j|n|k>| scaled by the 0-1 element.
    const RMat v = es.eigenvectors();
    RVec q(n);
    for (int i = 0; i < n; ++i) q[i] = i - c.n_cut;
    const RMat nop = v.transpose() * q.asDiagonal() * v;
    const double scale = std::abs(nop(0, 1));
    for (int j = 0; j < m.dim; ++j)
        for (int k = j + 1; k < m.dim; ++k) EXPECT_NEAR(std::abs(m.lower(j, k)), std::abs(nop(j, k)) / scale, 1e-9);
    // Transmon regime: the 1-2 element sits near the harmonic sqrt(2).
    EXPECT_NEAR(std::abs(m.lower(1, 2)), std::sqrt(2.0), 0.05);
    for (int j = 0; j < m.dim; ++j)
        for (int k = 0; k <= j; ++k) EXPECT_EQ(m.lower(j, k), cplx(0.0, 0.0));
}

TEST(ChargeModel, TruncationConvergence) {
    const DeviceSpec spec = reference_device();
    const TransmonModel a = fit_charge_model(spec, 15);
    const TransmonModel b = fit_charge_model(spec, 25);
    for (int k = 0; k < a.dim; ++k) EXPECT_LT(std::abs(rad_per_ns_to_ghz(a.omega[k] - b.omega[k])) * 1e9, 1.0);
}

TEST(ChargeModel, OffsetChargeDispersionFollowsAsymptotics) {
    const TransmonModel m = fit_charge_model(reference_device());
    const double ej = m.charge_fit->ej_ghz, ec = m.charge_fit->ec_ghz;
    const ChargeSpectrum a = charge_spectrum(ej, ec, 0.0, 20);
    const ChargeSpectrum b = charge_spectrum(ej, ec, 0.25, 20);
    // Large-Ej/Ec charge dispersion: E_m(n_g) = E_m(1/4) - (eps_m / 2) cos(2 pi n_g).
    auto eps = [&](int k) {
        return std::pow(-1.0, k) * ec * std::pow(2.0, 4 * k + 5) / std::tgamma(k + 1.0) * std::sqrt(2.0 / kPi) *
               std::pow(ej / (2.0 * ec), k / 2.0 + 0.75) * std::exp(-std::sqrt(8.0 * ej / ec));
    };
    double previous = 0.0;
    for (int k = 1; k < 4; ++k) {
        const double shift = a.energies_ghz[k] - b.energies_ghz[k];
        const double predicted = -(eps(k) - eps(0)) / 2.0;
        EXPECT_GT(shift / predicted, 0.3) << "level " << k;
        EXPECT_LT(shift / predicted, 1.5) << "level " << k;
        EXPECT_GT(std::abs(shift), 10.0 * previous);
        previous = std::abs(shift);
    }
    // The fitted transitions stay within 1 kHz of the measurement for any offset charge.
    const TransmonModel c = fit_charge_model(reference_device(), 20, 0.25);
    EXPECT_NEAR(transition_ghz(c, 0), 4.09948, 1e-6);
    EXPECT_NEAR(transition_ghz(c, 1), 3.87409, 1e-6);
    EXPECT_LT(std::abs(c.charge_fit->ej_ghz - ej) / ej, 1e-3);
}

TEST(ChargeModel, SmallBasisRejected) {
    EXPECT_THROW(fit_charge_model(reference_device(), 5), InvalidSpecError);
}

TEST(ChargeModel, TwoLevelSpecRejected) {
    DeviceSpec s = reference_device();
    s.dim = 2;
    s.transition_freqs_ghz.resize(1);
    s.t1_us.resize(1);
    s.t2_us.resize(1);
    s.t2_kind.resize(1);
    s.t2_ramsey_us.resize(1);
    s.guard_index = -1;
    EXPECT_THROW(fit_charge_model(s), InvalidSpecError);
}
