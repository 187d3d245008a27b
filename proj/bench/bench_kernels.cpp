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


// Parallel kernels against their serial references. Run with OMP_NUM_THREADS
// set to compare thread counts.

#include <benchmark/benchmark.h>

#include "qudit/model.hpp"
#include "qudit/optimize.hpp"
#include "qudit/propagate.hpp"
#include "qudit/tomography.hpp"
#include "qudit/waveform.hpp"

using namespace qudit;

namespace {

struct Fixture {
    TransmonModel model = model_from_spectrum(reference_device());
    RotatingFrame frame = resonant_frame(model);
    ControlHamiltonians hams = control_hamiltonians(model);
    ControlPulse pulse = ControlPulse::zeros(0.125, 1200);

    Fixture() {
        for (std::size_t n = 0; n < pulse.size(); ++n) {
            const double t = (static_cast<double>(n) + 0.5) / static_cast<double>(pulse.size());
            pulse.samples[n] = mhz_to_rad_per_ns(6.0) * std::sin(kPi * t) * cplx(std::cos(9.0 * t), std::sin(5.0 * t));
        }
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_CwtFft(benchmark::State& state) {
    const LabWaveform wave = synthesize_lab(fixture().pulse, fixture().frame.omega_d);
    const auto freqs = frequency_grid(3.5, 4.3, 0.005 * static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(morlet_cwt(wave, freqs));
}

void BM_CwtDirectReference(benchmark::State& state) {
    const LabWaveform wave = synthesize_lab(fixture().pulse, fixture().frame.omega_d);
    const auto freqs = frequency_grid(3.5, 4.3, 0.005 * static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(morlet_cwt_reference(wave, freqs));
}

ProcessMatrix noisy_swap() {
    Mat u = Mat::Zero(3, 3);
    u(0, 2) = u(2, 0) = u(1, 1) = 1.0;
    ProcessMatrix chi = chi_from_unitary(u);
    chi.chi = 0.98 * chi.chi;
    chi.chi(0, 0) += 0.02 / 3.0;
    return chi;
}

void BM_HaarAverageParallel(benchmark::State& state) {
    const ProcessMatrix chi = noisy_swap();
    const Mat u = Mat::Identity(3, 3);
    for (auto _ : state) benchmark::DoNotOptimize(average_fidelities(chi, u, static_cast<int>(state.range(0))));
}

void BM_HaarAverageSerial(benchmark::State& state) {
    const ProcessMatrix chi = noisy_swap();
    const Mat u = Mat::Identity(3, 3);
    for (auto _ : state) benchmark::DoNotOptimize(average_fidelities_serial(chi, u, static_cast<int>(state.range(0))));
}

void BM_SuperoperatorParallel(benchmark::State& state) {
    const Fixture& f = fixture();
    const CollapseSet set = collapse_operators(f.model.device);
    for (auto _ : state) benchmark::DoNotOptimize(gate_superoperator(f.frame, f.hams, f.pulse, set));
}

void BM_SuperoperatorSerial(benchmark::State& state) {
    const Fixture& f = fixture();
    const CollapseSet set = collapse_operators(f.model.device);
    for (auto _ : state) benchmark::DoNotOptimize(gate_superoperator_serial(f.frame, f.hams, f.pulse, set));
}

OptimizeConfig short_search() {
    OptimizeConfig cfg;
    cfg.objective = default_objective_config(4);
    cfg.starts = 4;
    cfg.max_iterations = 10;
    cfg.self_check = false;
    return cfg;
}

void BM_MultiStartParallel(benchmark::State& state) {
    const Fixture& f = fixture();
    const TargetGate target = swap02_gate(4);
    const OptimizeConfig cfg = short_search();
    for (auto _ : state) benchmark::DoNotOptimize(optimize_pulse(f.model, f.frame, target, cfg));
}

void BM_MultiStartSerial(benchmark::State& state) {
    const Fixture& f = fixture();
    const TargetGate target = swap02_gate(4);
    const OptimizeConfig cfg = short_search();
    for (auto _ : state) benchmark::DoNotOptimize(optimize_pulse_serial(f.model, f.frame, target, cfg));
}

}  // namespace

BENCHMARK(BM_CwtFft)->Arg(4)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CwtDirectReference)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HaarAverageParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HaarAverageSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuperoperatorParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuperoperatorSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiStartParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiStartSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
