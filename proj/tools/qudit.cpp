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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qudit/errors.hpp"
#include "qudit/io.hpp"
#include "qudit/model.hpp"
#include "qudit/optimize.hpp"
#include "qudit/propagate.hpp"
#include "qudit/tomography.hpp"
#include "qudit/waveform.hpp"

using namespace qudit;
namespace fs = std::filesystem;
using io::json;

namespace {

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kNotConverged = 3,
    kIntegrity = 4,
};

io::RunManifest manifest_for(const std::string& command, std::uint64_t seed = 0) {
    io::RunManifest m;
    m.command = command;
    m.seed = seed;
    return m;
}

std::string default_manifest(const std::string& out) { return out + ".manifest.json"; }

void finish(io::RunManifest m, const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
            const std::string& manifest_path) {
    for (const auto& p : inputs) m.inputs.push_back(io::digest_of(p));
    for (const auto& p : outputs) m.outputs.push_back(io::digest_of(p));
    io::write_json(manifest_path, io::manifest_to_json(m));
}

TransmonModel load_model(const std::string& path) { return io::model_from_json(io::read_json(path)); }

// ---------------------------------------------------------------- fit-model

struct FitModelArgs {
    std::string device, out, manifest;
    bool charge_fit = false;
    int n_cut = 20;
    double n_g = 0.0;
};

int run_fit_model(const FitModelArgs& a) {
    DeviceSpec spec = io::device_from_json(io::read_json(a.device));
    TransmonModel model = a.charge_fit ? fit_charge_model(spec, a.n_cut, a.n_g) : model_from_spectrum(spec);
    io::write_json(a.out, io::model_to_json(model));
    finish(manifest_for("fit-model"), {a.device}, {a.out}, a.manifest.empty() ? default_manifest(a.out) : a.manifest);
    std::printf("model: %s, %d levels, w_%d/2pi = %.6f GHz\n", to_string(model.source).c_str(), model.dim,
                model.dim - 1, rad_per_ns_to_ghz(model.omega[model.dim - 1]));
    return kOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
    std::string model, config, out, report, manifest, init;
};

int run_optimize(const OptimizeArgs& a) {
    TransmonModel model = load_model(a.model);
    io::OptimizationJob job = io::optimization_job_from_json(io::read_json(a.config), model.dim);
    RotatingFrame frame = resonant_frame(model);
    TargetGate target = io::make_target(job, frame, model.dim);
    std::optional<ControlPulse> init;
    if (!a.init.empty()) init = io::read_pulse(a.init);
    auto [pulse, report] = optimize_pulse(model, frame, target, job.config, init);
    io::write_pulse(a.out, pulse);
    json rep = io::optimization_report_to_json(report);
    rep["target"] = job.target;
    rep["config"] = io::optimization_job_to_json(job);
    io::write_json(a.report, rep);
    io::RunManifest m = manifest_for("optimize", job.config.seed);
    std::vector<std::string> inputs{a.model, a.config};
    if (!a.init.empty()) inputs.push_back(a.init);
    finish(m, inputs, {a.out, a.report}, a.manifest.empty() ? default_manifest(a.out) : a.manifest);
    std::printf("Fg = %.8f  leakage = %.3e  G = %.3e  best start %d  (%s)\n", report.fg, report.leakage, report.g,
                report.best_start, report.converged ? "converged" : "not converged");
    return report.converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------- synthesize

struct SynthesizeArgs {
    std::string model, pulse, out, manifest;
    double rate = 32.0;
    double scale_volts = 1.0;
};

int run_synthesize(const SynthesizeArgs& a) {
    TransmonModel model = load_model(a.model);
    ControlPulse pulse = io::read_pulse(a.pulse);
    SynthesisOptions so;
    so.sample_rate_per_ns = a.rate;
    LabWaveform wave = synthesize_lab(pulse, resonant_frame(model).omega_d, so);
    wave.scale_volts = a.scale_volts;
    io::export_waveform(wave, a.out);
    finish(manifest_for("synthesize"), {a.model, a.pulse}, {a.out}, a.manifest.empty() ? default_manifest(a.out) : a.manifest);
    std::printf("waveform: %zu samples at %g per ns, carrier %.5f GHz\n", wave.samples.size(),
                wave.sample_rate_per_ns, wave.carrier_ghz);
    return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string model, pulse, out, manifest, t2 = "ramsey";
    int initial = 0;
    int reps = 1;
    bool open = false;
    bool closed = false;
    bool lab = false;
    bool no_relaxation = false;
    bool no_dephasing = false;
    double interval_ns = 1.0;
};

int run_simulate(const SimulateArgs& a) {
    if (a.open && a.closed) throw CLI::ValidationError("--open and --closed are mutually exclusive");
    if (a.lab && a.open) throw CLI::ValidationError("lab-frame simulation is closed-system only");
    if (a.lab && a.reps != 1) throw CLI::ValidationError("lab-frame simulation supports --reps 1 only");
    if (a.reps < 1) throw CLI::ValidationError("--reps must be >= 1");
    TransmonModel model = load_model(a.model);
    if (a.initial < 0 || a.initial >= model.dim) throw RangeError("initial level outside the model");
    ControlPulse pulse = io::read_pulse(a.pulse);
    RotatingFrame frame = resonant_frame(model);
    ControlHamiltonians hams = control_hamiltonians(model);
    Mat rho0 = basis_density(model.dim, a.initial);

    CollapseOptions co;
    co.relaxation = !a.no_relaxation;
    co.dephasing = !a.no_dephasing;
    if (a.t2 == "echo")
        co.source = DephasingSource::echo;
    else if (a.t2 != "ramsey")
        throw CLI::ValidationError("--t2 must be ramsey or echo");
    CollapseSet collapse = collapse_operators(model.device, co);

    if (a.reps == 1) {
        TrajectoryResult tr;
        if (a.lab) {
            LabWaveform wave = synthesize_lab(pulse, frame.omega_d);
            LabPropagationOptions lo;
            lo.initial_level = a.initial;
            lo.record_interval_ns = a.interval_ns;
            tr = propagate_lab(model, wave, lo);
        } else if (a.open) {
            LindbladOptions lo;
            lo.record_interval_ns = a.interval_ns;
            tr = lindblad_evolve(frame, hams, pulse, rho0, collapse, lo);
        } else {
            PropagationOptions po;
            po.initial_level = a.initial;
            po.record_interval_ns = a.interval_ns;
            po.keep_propagators = false;
            tr = propagate_unitary(frame, hams, pulse, po);
        }
        io::write_trajectory_csv(a.out, tr.times_ns, tr.populations);
        const RVec& last = tr.populations.back();
        std::printf("final populations:");
        for (Eigen::Index k = 0; k < last.size(); ++k) std::printf(" %.6f", last[k]);
        std::printf("\n");
    } else {
        auto pops = repeated_gate_trajectory(frame, hams, pulse, a.reps, rho0, a.open ? &collapse : nullptr);
        io::write_repeated_csv(a.out, pops);
        std::printf("%d repetitions written\n", a.reps);
    }
    finish(manifest_for("simulate"), {a.model, a.pulse}, {a.out}, a.manifest.empty() ? default_manifest(a.out) : a.manifest);
    return kOk;
}

// ---------------------------------------------------------------- wavelet

struct WaveletArgs {
    std::string waveform, out, linecuts, manifest;
    double fmin = 3.5, fmax = 4.3, fstep = 0.005, cycles = 150.0;
    int time_stride = 32;
};

int run_wavelet(const WaveletArgs& a) {
    LabWaveform wave = io::import_waveform(a.waveform);
    auto freqs = frequency_grid(a.fmin, a.fmax, a.fstep);
    Scalogram s = morlet_cwt(wave, freqs, a.cycles);
    io::write_scalogram_csv(a.out, s, a.time_stride);
    io::write_linecuts_csv(a.linecuts, s);
    finish(manifest_for("wavelet"), {a.waveform}, {a.out, a.linecuts}, a.manifest.empty() ? default_manifest(a.out) : a.manifest);
    RVec e = s.mean_energy();
    auto peaks = peak_indices(e);
    for (std::size_t i = 0; i < peaks.size() && i < 3; ++i)
        std::printf("peak %zu: %.4f GHz  energy %.4e\n", i + 1, freqs[peaks[i]], e[peaks[i]]);
    return kOk;
}

// ---------------------------------------------------------------- tomo

struct TomoArgs {
    std::vector<std::string> data;
    std::string target = "swap02", model, pulse, out, report, manifest;
    double gate_time_ns = 0.0;
    int samples = 10000;
    std::uint64_t seed = 1;
    bool raw = false;
};

int run_tomo(const TomoArgs& a) {
    if (a.data.size() != 3) throw CLI::ValidationError("--data needs three files, for |0>, |1> and |2>");
    ProcessData data;
    for (const auto& path : a.data) data.push_back(io::read_repeated_csv(path));

    Mat u = Mat::Identity(kProcessDim, kProcessDim);
    if (a.target == "swap02") {
        u = Mat::Zero(kProcessDim, kProcessDim);
        u(0, 2) = u(2, 0) = u(1, 1) = 1.0;
    } else if (a.target != "identity") {
        throw CLI::ValidationError("--target must be swap02 or identity");
    }
    std::vector<std::string> inputs = a.data;
    if (!a.model.empty()) {
        // Data recorded in the rotating frame of the drive: compare against the
        // target as it appears there after one gate time.
        TransmonModel model = load_model(a.model);
        inputs.push_back(a.model);
        double tg = a.gate_time_ns;
        if (!a.pulse.empty()) {
            tg = io::read_pulse(a.pulse).gate_time_ns();
            inputs.push_back(a.pulse);
        }
        if (!(tg > 0.0)) throw CLI::ValidationError("--model needs --pulse or --gate-time-ns");
        Mat full = Mat::Identity(model.dim, model.dim);
        full.topLeftCorner(kProcessDim, kProcessDim) = u;
        u = computational_block(rotate_target(TargetGate{full, kProcessDim, a.target}, resonant_frame(model), tg));
    }

    FitOptions fo;
    fo.renormalize = !a.raw;
    FitResult fit = fit_chi(data, u, fo);
    FidelityReport fid = average_fidelities(fit.chi, u, a.samples, a.seed);

    io::write_json(a.out, io::chi_to_json(fit.chi));
    json rep = {{"format", "qudit.tomo_report"}, {"schema_version", io::kSchemaVersion}};
    rep["target"] = a.target;
    json tm = json::object();
    {
        json re = json::array(), im = json::array();
        for (int r = 0; r < kProcessDim; ++r) {
            json rr = json::array(), ri = json::array();
            for (int c = 0; c < kProcessDim; ++c) {
                rr.push_back(u(r, c).real());
                ri.push_back(u(r, c).imag());
            }
            re.push_back(rr);
            im.push_back(ri);
        }
        tm = {{"re", re}, {"im", im}};
    }
    rep["target_matrix"] = tm;
    rep["repetitions"] = static_cast<int>(data[0].size()) - 1;
    rep["renormalized"] = fo.renormalize;
    rep["fit"] = io::fit_diagnostics_to_json(fit.diagnostics);
    rep["fidelity"] = io::fidelity_report_to_json(fid);
    io::write_json(a.report, rep);

    io::RunManifest m = manifest_for("tomo", a.seed);
    finish(m, inputs, {a.out, a.report}, a.manifest.empty() ? default_manifest(a.out) : a.manifest);
    std::printf("average gate fidelity %.5f (+- %.1e), entanglement fidelity %.5f\n", fid.average_gate_fidelity,
                fid.standard_error, fid.entanglement_fidelity);
    std::printf("fit rms %.3e, tp violation %.2e, jacobian rank %d/%d, condition %.2e%s\n",
                fit.diagnostics.residual_rms, fit.diagnostics.tp_violation, fit.diagnostics.jacobian_rank, kBasisSize * kBasisSize,
                fit.diagnostics.jacobian_condition,
                fit.diagnostics.identifiability_warning ? " (identifiability warning)" : "");
    return fit.diagnostics.converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::vector<std::string> manifests;
    std::string out;
};

class DigestMismatch : public Error {
  public:
    using Error::Error;
};

int run_report(const ReportArgs& a) {
    if (a.manifests.empty()) throw CLI::ValidationError("report needs at least one manifest");
    json out = {{"format", "qudit.pipeline_report"}, {"schema_version", io::kSchemaVersion}};
    json runs = json::array();
    json summary = json::object();
    for (const auto& mpath : a.manifests) {
        io::RunManifest m = io::manifest_from_json(io::read_json(mpath));
        const fs::path base = fs::path(mpath).parent_path();
        auto resolve = [&](const std::string& p) {
            fs::path fp(p);
            if (fp.is_relative() && !fs::exists(fp)) fp = base / fp;
            return fp;
        };
        auto check = [&](const std::vector<io::FileDigest>& list) {
            for (const auto& d : list) {
                const fs::path fp = resolve(d.path);
                if (!fs::exists(fp)) throw DigestMismatch(d.path + " listed in " + mpath + " does not exist");
                if (io::sha256_file(fp) != d.sha256)
                    throw DigestMismatch("digest mismatch for " + d.path + " listed in " + mpath);
            }
        };
        check(m.inputs);
        check(m.outputs);
        runs.push_back(io::manifest_to_json(m));
        for (const auto& d : m.outputs) {
            const fs::path fp = resolve(d.path);
            if (fp.extension() != ".json") continue;
            std::ifstream in(fp);
            const json j = json::parse(in, nullptr, false);
            if (j.is_discarded() || !j.is_object()) continue;
            const std::string format = j.value("format", "");
            if (format == "qudit.optimization_report") {
                summary["optimization"] = {{"fg", j["fg"]},
                                           {"leakage", j["leakage"]},
                                           {"g", j["g"]},
                                           {"converged", j["converged"]},
                                           {"target", j.value("target", "")}};
            } else if (format == "qudit.tomo_report") {
                summary["tomography"] = {{"fidelity", j["fidelity"]},
                                         {"fit_residual_rms", j["fit"]["residual_rms"]},
                                         {"identifiability_condition", j["fit"]["jacobian_condition"]},
                                         {"identifiability_warning", j["fit"]["identifiability_warning"]}};
            } else if (format == "qudit.model") {
                summary["model"] = {{"source", j["source"]}, {"level_freqs_ghz", j["level_freqs_ghz"]}};
                if (j.contains("charge_fit")) summary["model"]["charge_fit"] = j["charge_fit"];
            }
        }
    }
    out["runs"] = runs;
    out["summary"] = summary;
    io::write_json(a.out, out);
    std::printf("%zu manifests verified\n", a.manifests.size());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulse design, simulation and process tomography for transmon qudits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::kToolVersion);

    FitModelArgs fm;
    auto* c_fit = app.add_subcommand("fit-model", "Build a transmon model from a device file");
    c_fit->add_option("--device", fm.device, "Device JSON")->required()->check(CLI::ExistingFile);
    c_fit->add_option("--out", fm.out, "Model JSON to write")->required();
    c_fit->add_flag("--charge-fit", fm.charge_fit, "Fit a Cooper-pair-box model instead of the harmonic ladder");
    c_fit->add_option("--n-cut", fm.n_cut, "Charge-basis cutoff")->check(CLI::Range(2, 200));
    c_fit->add_option("--n-g", fm.n_g, "Offset charge");
    c_fit->add_option("--manifest", fm.manifest, "Manifest path (default <out>.manifest.json)");

    OptimizeArgs op;
    auto* c_opt = app.add_subcommand("optimize", "Optimize a control pulse for a target gate");
    c_opt->add_option("--model", op.model, "Model JSON")->required()->check(CLI::ExistingFile);
    c_opt->add_option("--config", op.config, "Optimization config JSON")->required()->check(CLI::ExistingFile);
    c_opt->add_option("--out", op.out, "Pulse file to write")->required();
    c_opt->add_option("--report", op.report, "Report JSON to write")->required();
    c_opt->add_option("--init", op.init, "Initial pulse file")->check(CLI::ExistingFile);
    c_opt->add_option("--manifest", op.manifest, "Manifest path (default <out>.manifest.json)");

    SynthesizeArgs sy;
    auto* c_syn = app.add_subcommand("synthesize", "Render a rotating-frame pulse as a lab-frame waveform");
    c_syn->add_option("--model", sy.model, "Model JSON")->required()->check(CLI::ExistingFile);
    c_syn->add_option("--pulse", sy.pulse, "Pulse file")->required()->check(CLI::ExistingFile);
    c_syn->add_option("--out", sy.out, "Waveform file to write")->required();
    c_syn->add_option("--rate", sy.rate, "Samples per ns")->check(CLI::PositiveNumber);
    c_syn->add_option("--scale-volts", sy.scale_volts, "Volts per rad/ns, recorded in the header");
    c_syn->add_option("--manifest", sy.manifest, "Manifest path (default <out>.manifest.json)");

    SimulateArgs si;
    auto* c_sim = app.add_subcommand("simulate", "Simulate one gate or a repeated-gate sequence");
    c_sim->add_option("--model", si.model, "Model JSON")->required()->check(CLI::ExistingFile);
    c_sim->add_option("--pulse", si.pulse, "Pulse file")->required()->check(CLI::ExistingFile);
    c_sim->add_option("--initial", si.initial, "Initial level");
    c_sim->add_option("--reps", si.reps, "Gate repetitions");
    c_sim->add_flag("--open", si.open, "Include relaxation and dephasing");
    c_sim->add_flag("--closed", si.closed, "Closed-system evolution (default)");
    c_sim->add_flag("--lab", si.lab, "Lab-frame propagation of the synthesized waveform");
    c_sim->add_option("--t2", si.t2, "Dephasing times: ramsey or echo");
    c_sim->add_flag("--no-relaxation", si.no_relaxation, "Drop relaxation operators");
    c_sim->add_flag("--no-dephasing", si.no_dephasing, "Drop dephasing operators");
    c_sim->add_option("--interval-ns", si.interval_ns, "Recording interval")->check(CLI::PositiveNumber);
    c_sim->add_option("--out", si.out, "CSV to write")->required();
    c_sim->add_option("--manifest", si.manifest, "Manifest path (default <out>.manifest.json)");

    WaveletArgs wv;
    auto* c_wav = app.add_subcommand("wavelet", "Morlet scalogram of a lab-frame waveform");
    c_wav->add_option("--waveform", wv.waveform, "Waveform file")->required()->check(CLI::ExistingFile);
    c_wav->add_option("--fmin", wv.fmin, "Lowest analysis frequency (GHz)");
    c_wav->add_option("--fmax", wv.fmax, "Highest analysis frequency (GHz)");
    c_wav->add_option("--fstep", wv.fstep, "Frequency step (GHz)")->check(CLI::PositiveNumber);
    c_wav->add_option("--cycles", wv.cycles, "Wavelet cycles")->check(CLI::PositiveNumber);
    c_wav->add_option("--time-stride", wv.time_stride, "Keep every n-th time sample in the scalogram CSV")
        ->check(CLI::PositiveNumber);
    c_wav->add_option("--out", wv.out, "Scalogram CSV to write")->required();
    c_wav->add_option("--linecuts", wv.linecuts, "Time-averaged linecut CSV to write")->required();
    c_wav->add_option("--manifest", wv.manifest, "Manifest path (default <out>.manifest.json)");

    TomoArgs tm;
    auto* c_tomo = app.add_subcommand("tomo", "Fit a process matrix to repeated-gate populations");
    c_tomo->add_option("--data", tm.data, "Repeated-gate CSVs for |0>, |1>, |2>")->required()->expected(3)
        ->check(CLI::ExistingFile);
    c_tomo->add_option("--target", tm.target, "swap02 or identity");
    c_tomo->add_option("--model", tm.model, "Model JSON; rotates the target into the drive frame")
        ->check(CLI::ExistingFile);
    c_tomo->add_option("--pulse", tm.pulse, "Pulse file supplying the gate time")->check(CLI::ExistingFile);
    c_tomo->add_option("--gate-time-ns", tm.gate_time_ns, "Gate time when no pulse file is given");
    c_tomo->add_option("--samples", tm.samples, "Haar samples")->check(CLI::PositiveNumber);
    c_tomo->add_option("--seed", tm.seed, "Haar sampling seed");
    c_tomo->add_flag("--raw", tm.raw, "Fit populations as given instead of renormalizing over levels 0-2");
    c_tomo->add_option("--out", tm.out, "Chi JSON to write")->required();
    c_tomo->add_option("--report", tm.report, "Fidelity report JSON to write")->required();
    c_tomo->add_option("--manifest", tm.manifest, "Manifest path (default <out>.manifest.json)");

    ReportArgs rp;
    auto* c_rep = app.add_subcommand("report", "Verify manifests and merge their results");
    c_rep->add_option("--manifest", rp.manifests, "Manifest files")->expected(0, -1);
    c_rep->add_option("--out", rp.out, "Report JSON to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*c_fit) return run_fit_model(fm);
        if (*c_opt) return run_optimize(op);
        if (*c_syn) return run_synthesize(sy);
        if (*c_sim) return run_simulate(si);
        if (*c_wav) return run_wavelet(wv);
        if (*c_tomo) return run_tomo(tm);
        if (*c_rep) return run_report(rp);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidSpecError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kUsage;
    } catch (const RangeError& e) {
        std::cerr << "range error: " << e.what() << '\n';
        return kUsage;
    } catch (const FitFailureError& e) {
        std::cerr << "fit failed: " << e.what() << '\n';
        return kNotConverged;
    } catch (const DigestMismatch& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const Error& e) {
        std::cerr << "numeric integrity error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
