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
#include "qudit/optimize.hpp"
#include "qudit/propagate.hpp"
#include "qudit/waveform.hpp"
#include "test_support.hpp"

using namespace qudit;
using qudit::testing::random_pulse;
using qudit::testing::two_level_device;

namespace {

struct Table {
    TransmonModel model = model_from_spectrum(reference_device());
    RotatingFrame frame = resonant_frame(model);
    ControlHamiltonians hams = control_hamiltonians(model);
};

}  // namespace

TEST(Propagate, ZeroPulseIsDiagonalPhase) {
    Table t;
    const ControlPulse p = ControlPulse::zeros(0.125, 1200);
    const Mat u = gate_propagator(t.frame, t.hams, p);
    const double tg = p.gate_time_ns();
    Mat expected = Mat::Zero(4, 4);
    for (int k = 0; k < 4; ++k) expected(k, k) = std::exp(cplx(0.0, -t.frame.delta[k] * tg));
    EXPECT_LT(max_abs(u - expected), 1e-12);
}

TEST(Propagate, TwoLevelRabiFormula) {
    const TransmonModel m = model_from_spectrum(two_level_device());
    const RotatingFrame f = resonant_frame(m);
    const ControlHamiltonians h = control_hamiltonians(m);
    const double xi = mhz_to_rad_per_ns(5.0);
    ControlPulse p = ControlPulse::zeros(0.125, 800);
    for (auto& s : p.samples) s = xi;
    PropagationOptions po;
    po.initial_level = 0;
    const TrajectoryResult tr = propagate_unitary(f, h, p, po);
    ASSERT_EQ(tr.times_ns.size(), 801u);
    for (std::size_t i = 0; i < tr.times_ns.size(); i += 37) {
        const double s = std::sin(xi * tr.times_ns[i]);
        EXPECT_NEAR(tr.populations[i][1], s * s, 1e-12);
    }
}

TEST(Propagate, UnitarityAndPopulationNormalization) {
    Table t;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const ControlPulse p = random_pulse(600, 0.125, mhz_to_rad_per_ns(6.0), seed);
        PropagationOptions po;
        po.initial_level = static_cast<int>(seed % 4);
        const TrajectoryResult tr = propagate_unitary(t.frame, t.hams, p, po);
        for (const auto& u : tr.propagators) EXPECT_LT(unitarity_deviation(u), 1e-10);
        for (const auto& pop : tr.populations) {
            EXPECT_NEAR(pop.sum(), 1.0, 1e-12);
            EXPECT_GE(pop.minCoeff(), -1e-15);
            EXPECT_LE(pop.maxCoeff(), 1.0 + 1e-12);
        }
    }
}

TEST(Propagate, StepHalvingLeavesPopulationsUnchanged) {
    Table t;
    const ControlPulse p = random_pulse(1200, 0.125, mhz_to_rad_per_ns(6.0), 11);
    PropagationOptions po;
    po.keep_propagators = false;
    const RVec coarse = propagate_unitary(t.frame, t.hams, p, po).populations.back();
    const RVec fine = propagate_unitary(t.frame, t.hams, refine(p, 2), po).populations.back();
    EXPECT_LT((coarse - fine).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Propagate, RecordIntervalOneNanosecond) {
    Table t;
    const ControlPulse p = random_pulse(1200, 0.125, mhz_to_rad_per_ns(6.0), 3);
    PropagationOptions po;
    po.record_interval_ns = 1.0;
    const TrajectoryResult tr = propagate_unitary(t.frame, t.hams, p, po);
    ASSERT_EQ(tr.times_ns.size(), 151u);
    EXPECT_EQ(tr.times_ns.front(), 0.0);
    EXPECT_DOUBLE_EQ(tr.times_ns.back(), 150.0);
}

TEST(Propagate, OversizedStepRejected) {
    Table t;
    ControlPulse p = ControlPulse::zeros(5.0, 4);
    p.samples[1] = 2.0;
    EXPECT_THROW(propagate_unitary(t.frame, t.hams, p), RefineGridError);
}

TEST(Propagate, ClosedRepetitionEqualsMatrixPower) {
    Table t;
    const ControlPulse p = random_pulse(400, 0.125, mhz_to_rad_per_ns(6.0), 5);
    const Mat u = gate_propagator(t.frame, t.hams, p);
    const Mat rho0 = basis_density(4, 0);
    const auto pops = repeated_gate_trajectory(t.frame, t.hams, p, 9, rho0, nullptr);
    ASSERT_EQ(pops.size(), 10u);
    Mat un = Mat::Identity(4, 4);
    for (int r = 0; r <= 9; ++r) {
        const Mat rho = un * rho0 * un.adjoint();
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(pops[r][k], rho(k, k).real(), 1e-10);
        un = u * un;
    }
}

TEST(Propagate, IdealSwapRepetition) {
    const Mat swap = swap02_gate(4).matrix;
    const auto from0 = repeat_unitary(swap, basis_density(4, 0), 4);
    for (int r = 1; r <= 4; ++r) EXPECT_NEAR(from0[r][2], r % 2 == 1 ? 1.0 : 0.0, 1e-15);
    const auto from3 = repeat_unitary(swap, basis_density(4, 3), 7);
    for (const auto& p : from3) EXPECT_EQ(p[3], 1.0);
    EXPECT_THROW(repeated_gate_trajectory(Table{}.frame, Table{}.hams, ControlPulse::zeros(0.125, 4), 0,
                                          basis_density(4, 0), nullptr),
                 InvalidSpecError);
}

TEST(Collapse, PureDephasingArithmetic) {
    EXPECT_NEAR(pure_dephasing_rate_per_us(55.0, 35.0), 1.0 / 35.0 - 1.0 / 110.0, 1e-15);
    EXPECT_NEAR(pure_dephasing_rate_per_us(55.0, 35.0), 0.01948, 5e-6);
    EXPECT_EQ(pure_dephasing_rate_per_us(10.0, 20.0), 0.0);
    EXPECT_EQ(pure_dephasing_rate_per_us(INFINITY, INFINITY), 0.0);
    EXPECT_THROW(pure_dephasing_rate_per_us(10.0, 20.5), InvalidCoherenceError);
}

TEST(Collapse, OperatorStructure) {
    const CollapseSet set = collapse_operators(reference_device());
    int relax = 0;
    for (const auto& c : set.ops) {
        EXPECT_GE(c.rate, 0.0);
        if (c.label.rfind("relax", 0) == 0) ++relax;
    }
    EXPECT_EQ(relax, 3);
    EXPECT_NEAR(set.ops[0].rate, 1.0 / 55000.0, 1e-18);
    EXPECT_EQ(set.ops[0].op(0, 1), cplx(1.0, 0.0));

    DeviceSpec ideal = two_level_device(4.0, INFINITY, INFINITY);
    EXPECT_TRUE(collapse_operators(ideal).empty());

    DeviceSpec edge = two_level_device(4.0, 10.0, 20.0);
    const CollapseSet e = collapse_operators(edge);
    ASSERT_EQ(e.ops.size(), 1u);
    EXPECT_EQ(e.ops[0].label.rfind("relax", 0), 0u);

    DeviceSpec bad = two_level_device(4.0, 10.0, 25.0);
    EXPECT_THROW(collapse_operators(bad), InvalidCoherenceError);
}

TEST(Collapse, AdjacentCoherencesDecayAtMeasuredRates) {
    Table t;
    CollapseOptions co;
    co.relaxation = false;
    const DeviceSpec spec = reference_device();
    const CollapseSet set = collapse_operators(spec, co);
    const ControlPulse p = ControlPulse::zeros(0.5, 400);
    LindbladOptions lo;
    lo.keep_density = true;
    for (int k = 0; k < 3; ++k) {
        Mat rho0 = Mat::Zero(4, 4);
        rho0(k, k) = rho0(k + 1, k + 1) = rho0(k, k + 1) = rho0(k + 1, k) = 0.5;
        const TrajectoryResult tr = lindblad_evolve(t.frame, t.hams, p, rho0, set, lo);
        const double tg_us = p.gate_time_ns() * 1e-3;
        const double t2 = spec.t2_ramsey_us[k];
        const double expected = 0.5 * std::exp(-pure_dephasing_rate_per_us(spec.t1_us[k], t2) * tg_us);
        EXPECT_NEAR(std::abs(tr.density.back()(k, k + 1)), expected, 1e-9 * expected + 1e-12) << "transition " << k;
    }
}

TEST(Lindblad, UndrivenDecayMatchesExponential) {
    Table t;
    const CollapseSet set = collapse_operators(reference_device());
    const ControlPulse p = ControlPulse::zeros(0.125, 1200);
    LindbladOptions lo;
    lo.record_interval_ns = 1.0;
    const TrajectoryResult tr = lindblad_evolve(t.frame, t.hams, p, basis_density(4, 1), set, lo);
    for (std::size_t i = 0; i < tr.times_ns.size(); ++i) {
        const double expected = std::exp(-tr.times_ns[i] / 55000.0);
        EXPECT_LT(std::abs(tr.populations[i][1] - expected) / expected, 1e-6);
    }
}

TEST(Lindblad, PhysicalStateInvariants) {
    Table t;
    const CollapseSet set = collapse_operators(reference_device());
    const ControlPulse p = random_pulse(800, 0.125, mhz_to_rad_per_ns(6.0), 21);
    LindbladOptions lo;
    lo.keep_density = true;
    lo.record_interval_ns = 2.0;
    Mat rho0 = Mat::Zero(4, 4);
    rho0(0, 0) = 0.6;
    rho0(2, 2) = 0.4;
    rho0(0, 2) = rho0(2, 0) = 0.3;
    const TrajectoryResult tr = lindblad_evolve(t.frame, t.hams, p, rho0, set, lo);
    for (const Mat& rho : tr.density) {
        EXPECT_LT(std::abs(rho.trace() - 1.0), 1e-8);
        EXPECT_LT(hermiticity_deviation(rho), 1e-8);
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()));
        EXPECT_GT(es.eigenvalues().minCoeff(), -1e-8);
    }
}

TEST(Lindblad, NoCollapseMatchesUnitary) {
    Table t;
    const ControlPulse p = random_pulse(800, 0.125, mhz_to_rad_per_ns(6.0), 8);
    for (int level : {0, 2}) {
        PropagationOptions po;
        po.initial_level = level;
        po.keep_propagators = false;
        LindbladOptions lo;
        const auto u = propagate_unitary(t.frame, t.hams, p, po);
        const auto l = lindblad_evolve(t.frame, t.hams, p, basis_density(4, level), CollapseSet{}, lo);
        ASSERT_EQ(u.populations.size(), l.populations.size());
        for (std::size_t i = 0; i < u.populations.size(); ++i)
            EXPECT_LT((u.populations[i] - l.populations[i]).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Lindblad, UndrivenNoCollapseKeepsPopulations) {
    Table t;
    Mat rho0 = Mat::Constant(4, 4, cplx(0.25, 0.0));
    const auto tr = lindblad_evolve(t.frame, t.hams, ControlPulse::zeros(0.125, 400), rho0, CollapseSet{});
    for (const auto& p : tr.populations)
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(p[k], 0.25, 1e-13);
}

TEST(Lindblad, InvalidInitialStateRejected) {
    Table t;
    Mat rho0 = basis_density(4, 0) * 2.0;
    EXPECT_THROW(lindblad_evolve(t.frame, t.hams, ControlPulse::zeros(0.125, 4), rho0, CollapseSet{}),
                 InvalidSpecError);
}

TEST(Lindblad, AccuracyErrorWhenRefinementExhausted) {
    Table t;
    CollapseSet fast;
    CollapseOperator c;
    c.op = Mat::Zero(4, 4);
    c.op(0, 1) = 1.0;
    c.rate = 40.0;
    fast.ops.push_back(c);
    LindbladOptions lo;
    lo.substeps = 1;
    lo.max_refinements = 0;
    lo.tolerance = 1e-14;
    EXPECT_THROW(lindblad_evolve(t.frame, t.hams, ControlPulse::zeros(0.125, 4), basis_density(4, 1), fast, lo),
                 AccuracyError);
}

TEST(Lindblad, ParallelSuperoperatorMatchesSerial) {
    Table t;
    const CollapseSet set = collapse_operators(reference_device());
    const ControlPulse p = random_pulse(160, 0.125, mhz_to_rad_per_ns(6.0), 4);
    const Mat a = gate_superoperator(t.frame, t.hams, p, set);
    const Mat b = gate_superoperator_serial(t.frame, t.hams, p, set);
    EXPECT_EQ(max_abs(a - b), 0.0);
}

TEST(Lindblad, SuperoperatorRepetitionMatchesDirectEvolution) {
    Table t;
    const CollapseSet set = collapse_operators(reference_device());
    const ControlPulse p = random_pulse(160, 0.125, mhz_to_rad_per_ns(6.0), 6);
    const Mat rho0 = basis_density(4, 0);
    const auto reps = repeated_gate_trajectory(t.frame, t.hams, p, 3, rho0, &set);
    ControlPulse three = p;
    for (int r = 0; r < 2; ++r) three.samples.insert(three.samples.end(), p.samples.begin(), p.samples.end());
    const auto direct = lindblad_evolve(t.frame, t.hams, three, rho0, set);
    EXPECT_LT((reps[3] - direct.populations.back()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lindblad, GuardLevelDecaysMonotonically) {
    Table t;
    const CollapseSet set = collapse_operators(reference_device());
    const ControlPulse p = random_pulse(160, 0.125, mhz_to_rad_per_ns(6.0), 6);
    const Mat s = gate_superoperator(t.frame, t.hams, p, set);
    const auto pops = repeat_superoperator(s, basis_density(4, 3), 21);
    for (std::size_t r = 1; r < pops.size(); ++r) EXPECT_LT(pops[r][3], pops[r - 1][3]);
}

TEST(LabFrame, ZeroWaveformKeepsPopulations) {
    const TransmonModel m = model_from_spectrum(reference_device());
    LabWaveform w;
    w.samples.assign(3200, 0.0);
    w.duration_ns = 100.0;
    LabPropagationOptions lo;
    lo.initial_level = 2;
    const auto tr = propagate_lab(m, w, lo);
    for (const auto& p : tr.populations) EXPECT_NEAR(p[2], 1.0, 1e-12);
}

TEST(LabFrame, ResonantToneDrivesRabiOscillation) {
    const TransmonModel m = model_from_spectrum(two_level_device());
    const double xi = mhz_to_rad_per_ns(2.0);
    const double w01 = m.omega[1];
    LabWaveform w;
    w.duration_ns = 125.0;
    const std::size_t n = static_cast<std::size_t>(std::llround(w.duration_ns * w.sample_rate_per_ns));
    for (std::size_t k = 0; k < n; ++k) w.samples.push_back(2.0 * xi * std::cos(w01 * k / w.sample_rate_per_ns));
    LabPropagationOptions lo;
    lo.record_interval_ns = 5.0;
    const auto tr = propagate_lab(m, w, lo);
    // Counter-rotating terms leave a Bloch-Siegert residue of order xi / omega.
    for (std::size_t i = 0; i < tr.times_ns.size(); ++i) {
        const double s = std::sin(xi * tr.times_ns[i]);
        EXPECT_NEAR(tr.populations[i][1], s * s, 2e-3);
    }
    EXPECT_GT(tr.populations.back()[1], 0.998);
}
