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

#include "qudit/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "qudit/errors.hpp"

namespace qudit::io {

namespace {

const json& field(const json& j, const char* name) {
    if (!j.is_object()) throw SchemaError("expected an object while looking for field '" + std::string(name) + "'");
    auto it = j.find(name);
    if (it == j.end()) throw SchemaError("missing field '" + std::string(name) + "'");
    return *it;
}

template <class T>
T get_as(const json& j, const char* name) {
    const json& v = field(j, name);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw SchemaError("field '" + std::string(name) + "' has the wrong type");
    }
}

// Times may be infinite ("inf" in files); JSON has no literal for it.
double time_value(const json& v, const char* name) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw SchemaError("field '" + std::string(name) + "' must hold numbers or \"inf\"");
}

std::vector<double> time_list(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_array()) throw SchemaError("field '" + std::string(name) + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(time_value(x, name));
    return out;
}

json time_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        if (std::isinf(x))
            a.push_back("inf");
        else
            a.push_back(x);
    }
    return a;
}

void check_format(const json& j, const std::string& format) {
    const auto f = get_as<std::string>(j, "format");
    if (f != format) throw SchemaError("field 'format' is '" + f + "', expected '" + format + "'");
    const int v = get_as<int>(j, "schema_version");
    if (v != kSchemaVersion)
        throw SchemaError("field 'schema_version' is " + std::to_string(v) + ", expected " +
                          std::to_string(kSchemaVersion));
}

json header(const std::string& format) { return json{{"format", format}, {"schema_version", kSchemaVersion}}; }

json matrix_json(const Mat& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rr = json::array(), ri = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return json{{"re", re}, {"im", im}};
}

Mat matrix_from_json(const json& j, const char* name) {
    const json& m = field(j, name);
    const json& re = field(m, "re");
    const json& im = field(m, "im");
    if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty())
        throw SchemaError("field '" + std::string(name) + "' must hold equal-sized re/im row arrays");
    const auto rows = static_cast<Eigen::Index>(re.size());
    const auto cols = static_cast<Eigen::Index>(re[0].size());
    Mat out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (re[r].size() != static_cast<std::size_t>(cols) || im[r].size() != static_cast<std::size_t>(cols))
            throw SchemaError("field '" + std::string(name) + "' has ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!re[r][c].is_number() || !im[r][c].is_number())
                throw SchemaError("field '" + std::string(name) + "' must hold numbers");
            out(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
        }
    }
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw SchemaError("unknown field '" + it.key() + "' in " + where);
}

T2Kind t2_kind_from(const std::string& s) {
    if (s == "ramsey") return T2Kind::ramsey;
    if (s == "echo") return T2Kind::echo;
    throw SchemaError("field 't2_kind' entries must be \"ramsey\" or \"echo\", got '" + s + "'");
}

// ---- text header helpers ----

struct TextFile {
    std::map<std::string, std::string> header;
    std::vector<std::string> body;
};

TextFile read_text(const fs::path& path, const std::string& format) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    TextFile tf;
    std::string line;
    bool in_body = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (in_body) {
            if (!line.empty()) tf.body.push_back(line);
            continue;
        }
        if (line == "---") {
            in_body = true;
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("malformed header line '" + line + "' in " + path.string());
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        tf.header[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    if (!in_body) throw FormatError("missing '---' separator in " + path.string());
    auto it = tf.header.find("format");
    if (it == tf.header.end() || it->second != format)
        throw FormatError(path.string() + " is not a " + format + " file");
    it = tf.header.find("schema_version");
    if (it == tf.header.end() || it->second != std::to_string(kSchemaVersion))
        throw FormatError(path.string() + " has an unsupported schema_version");
    return tf;
}

const std::string& header_value(const TextFile& tf, const std::string& key) {
    auto it = tf.header.find(key);
    if (it == tf.header.end()) throw FormatError("missing header key '" + key + "'");
    return it->second;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw FormatError("cannot parse " + what + " from '" + s + "'");
    }
    if (pos != s.size()) throw FormatError("trailing characters in " + what + " '" + s + "'");
    return v;
}

long long parse_int(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw FormatError("cannot parse " + what + " from '" + s + "'");
    }
    if (pos != s.size()) throw FormatError("trailing characters in " + what + " '" + s + "'");
    return v;
}

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%+.17e", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::vector<std::vector<double>> read_csv_table(const fs::path& path, const std::string& first_column,
                                                std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    columns = split_csv(line);
    if (columns.size() < 2 || columns[0] != first_column)
        throw FormatError(path.string() + " header must start with '" + first_column + "'");
    for (std::size_t k = 1; k < columns.size(); ++k)
        if (columns[k] != "p" + std::to_string(k - 1))
            throw FormatError(path.string() + " column " + std::to_string(k) + " must be 'p" +
                              std::to_string(k - 1) + "'");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != columns.size())
            throw FormatError(path.string() + " row " + std::to_string(rows.size() + 1) + " has " +
                              std::to_string(cells.size()) + " cells, expected " + std::to_string(columns.size()));
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c, "CSV cell"));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- device/model

json device_to_json(const DeviceSpec& spec) {
    json j = header("qudit.device");
    j["dim"] = spec.dim;
    j["transition_freqs_ghz"] = spec.transition_freqs_ghz;
    j["t1_us"] = time_json(spec.t1_us);
    j["t2_us"] = time_json(spec.t2_us);
    json kinds = json::array();
    for (auto k : spec.t2_kind) kinds.push_back(to_string(k));
    j["t2_kind"] = kinds;
    j["t2_ramsey_us"] = time_json(spec.t2_ramsey_us);
    j["guard_index"] = spec.guard();
    j["readout_freq_ghz"] = spec.readout_freq_ghz;
    j["chi_qc_mhz"] = spec.chi_qc_mhz;
    return j;
}

DeviceSpec device_from_json(const json& j) {
    check_format(j, "qudit.device");
    reject_unknown(j,
                   {"format", "schema_version", "dim", "transition_freqs_ghz", "t1_us", "t2_us", "t2_kind",
                    "t2_ramsey_us", "guard_index", "readout_freq_ghz", "chi_qc_mhz"},
                   "device file");
    DeviceSpec s;
    s.dim = get_as<int>(j, "dim");
    s.transition_freqs_ghz = get_as<std::vector<double>>(j, "transition_freqs_ghz");
    s.t1_us = time_list(j, "t1_us");
    s.t2_us = time_list(j, "t2_us");
    for (const auto& k : get_as<std::vector<std::string>>(j, "t2_kind")) s.t2_kind.push_back(t2_kind_from(k));
    if (j.contains("t2_ramsey_us")) s.t2_ramsey_us = time_list(j, "t2_ramsey_us");
    s.guard_index = j.contains("guard_index") ? get_as<int>(j, "guard_index") : -1;
    s.readout_freq_ghz = j.contains("readout_freq_ghz") ? get_as<double>(j, "readout_freq_ghz") : 0.0;
    s.chi_qc_mhz = j.contains("chi_qc_mhz") ? get_as<double>(j, "chi_qc_mhz") : 0.0;
    s.validate();
    return s;
}

json model_to_json(const TransmonModel& model) {
    json j = header("qudit.model");
    j["dim"] = model.dim;
    j["omega_rad_per_ns"] = std::vector<double>(model.omega.data(), model.omega.data() + model.omega.size());
    std::vector<double> ghz;
    for (Eigen::Index k = 0; k < model.omega.size(); ++k) ghz.push_back(rad_per_ns_to_ghz(model.omega[k]));
    j["level_freqs_ghz"] = ghz;
    j["lower"] = matrix_json(model.lower);
    j["source"] = to_string(model.source);
    if (model.charge_fit) {
        const auto& c = *model.charge_fit;
        j["charge_fit"] = {{"ej_ghz", c.ej_ghz}, {"ec_ghz", c.ec_ghz},     {"n_g", c.n_g},
                           {"n_cut", c.n_cut},   {"residual_khz", c.residual_khz}, {"iterations", c.iterations}};
    }
    j["device"] = device_to_json(model.device);
    return j;
}

TransmonModel model_from_json(const json& j) {
    check_format(j, "qudit.model");
    TransmonModel m;
    m.dim = get_as<int>(j, "dim");
    auto omega = get_as<std::vector<double>>(j, "omega_rad_per_ns");
    if (static_cast<int>(omega.size()) != m.dim) throw SchemaError("field 'omega_rad_per_ns' must have dim entries");
    m.omega = Eigen::Map<RVec>(omega.data(), m.dim);
    m.lower = matrix_from_json(j, "lower");
    if (m.lower.rows() != m.dim || m.lower.cols() != m.dim) throw SchemaError("field 'lower' must be dim x dim");
    const auto src = get_as<std::string>(j, "source");
    if (src == "spectrum")
        m.source = ModelSource::spectrum;
    else if (src == "charge_fit")
        m.source = ModelSource::charge_fit;
    else
        throw SchemaError("field 'source' must be \"spectrum\" or \"charge_fit\"");
    if (j.contains("charge_fit")) {
        const json& c = j["charge_fit"];
        ChargeFitInfo info;
        info.ej_ghz = get_as<double>(c, "ej_ghz");
        info.ec_ghz = get_as<double>(c, "ec_ghz");
        info.n_g = get_as<double>(c, "n_g");
        info.n_cut = get_as<int>(c, "n_cut");
        info.residual_khz = get_as<double>(c, "residual_khz");
        info.iterations = get_as<int>(c, "iterations");
        m.charge_fit = info;
    }
    m.device = device_from_json(field(j, "device"));
    return m;
}

// ---------------------------------------------------------------- optimization

OptimizationJob optimization_job_from_json(const json& j, int dim) {
    check_format(j, "qudit.optimize");
    reject_unknown(j,
                   {"format", "schema_version", "target", "target_matrix", "gate_time_ns", "dt_ns",
                    "amplitude_cap_mhz", "guard_weights", "leakage_weight", "boundary_zero", "ramp_ns",
                    "f_max_mhz", "computational_dim", "seed", "starts", "max_iterations", "fg_threshold",
                    "init_amplitude", "init_bandwidth_mhz", "gradient_tolerance", "lbfgs_memory", "self_check"},
                   "optimization config");
    OptimizationJob job;
    job.config.objective = default_objective_config(dim);
    auto& o = job.config.objective;
    auto& c = job.config;
    job.target = get_as<std::string>(j, "target");
    if (job.target == "matrix") {
        job.target_matrix = matrix_from_json(j, "target_matrix");
    } else if (job.target != "swap02" && job.target != "identity" && job.target != "free_evolution") {
        throw SchemaError("field 'target' must be swap02, identity, free_evolution or matrix");
    }
    auto opt = [&](const char* key, auto& dst) {
        using T = std::decay_t<decltype(dst)>;
        if (j.contains(key)) dst = get_as<T>(j, key);
    };
    opt("gate_time_ns", o.gate_time_ns);
    opt("dt_ns", o.dt_ns);
    if (j.contains("amplitude_cap_mhz")) o.amplitude_cap = mhz_to_rad_per_ns(get_as<double>(j, "amplitude_cap_mhz"));
    if (j.contains("guard_weights")) {
        auto w = get_as<std::vector<double>>(j, "guard_weights");
        if (static_cast<int>(w.size()) != dim) throw SchemaError("field 'guard_weights' must have dim entries");
        o.guard_weights = Eigen::Map<RVec>(w.data(), dim);
    }
    opt("leakage_weight", o.leakage_weight);
    opt("boundary_zero", o.boundary_zero);
    opt("ramp_ns", o.ramp_ns);
    opt("f_max_mhz", o.f_max_mhz);
    opt("computational_dim", o.computational_dim);
    opt("seed", c.seed);
    opt("starts", c.starts);
    opt("max_iterations", c.max_iterations);
    opt("fg_threshold", c.fg_threshold);
    opt("init_amplitude", c.init_amplitude);
    opt("init_bandwidth_mhz", c.init_bandwidth_mhz);
    opt("gradient_tolerance", c.gradient_tolerance);
    opt("lbfgs_memory", c.lbfgs_memory);
    opt("self_check", c.self_check);
    if (!(o.gate_time_ns > 0.0) || !(o.dt_ns > 0.0)) throw SchemaError("gate_time_ns and dt_ns must be positive");
    if (c.starts < 1) throw SchemaError("field 'starts' must be >= 1");
    if (o.computational_dim < 1 || o.computational_dim > dim)
        throw SchemaError("field 'computational_dim' must lie in [1, dim]");
    return job;
}

json optimization_job_to_json(const OptimizationJob& job) {
    const auto& o = job.config.objective;
    const auto& c = job.config;
    json j = header("qudit.optimize");
    j["target"] = job.target;
    if (job.target == "matrix") j["target_matrix"] = matrix_json(job.target_matrix);
    j["gate_time_ns"] = o.gate_time_ns;
    j["dt_ns"] = o.dt_ns;
    j["amplitude_cap_mhz"] = rad_per_ns_to_mhz(o.amplitude_cap);
    j["guard_weights"] = std::vector<double>(o.guard_weights.data(), o.guard_weights.data() + o.guard_weights.size());
    j["leakage_weight"] = o.leakage_weight;
    j["boundary_zero"] = o.boundary_zero;
    j["ramp_ns"] = o.ramp_ns;
    j["f_max_mhz"] = o.f_max_mhz;
    j["computational_dim"] = o.computational_dim;
    j["seed"] = c.seed;
    j["starts"] = c.starts;
    j["max_iterations"] = c.max_iterations;
    j["fg_threshold"] = c.fg_threshold;
    j["init_amplitude"] = c.init_amplitude;
    j["init_bandwidth_mhz"] = c.init_bandwidth_mhz;
    j["gradient_tolerance"] = c.gradient_tolerance;
    j["lbfgs_memory"] = c.lbfgs_memory;
    j["self_check"] = c.self_check;
    return j;
}

TargetGate make_target(const OptimizationJob& job, const RotatingFrame& frame, int dim) {
    const int dc = job.config.objective.computational_dim;
    if (job.target == "swap02") return swap02_gate(dim, dc);
    if (job.target == "identity") return identity_gate(dim, dc);
    if (job.target == "free_evolution") return free_evolution_gate(frame, job.config.objective.gate_time_ns, dc);
    if (job.target_matrix.rows() != dim || job.target_matrix.cols() != dim)
        throw SchemaError("field 'target_matrix' must be dim x dim");
    if (unitarity_deviation(job.target_matrix) > 1e-9) throw SchemaError("field 'target_matrix' is not unitary");
    return TargetGate{job.target_matrix, dc, "matrix"};
}

json optimization_report_to_json(const OptimizationReport& r) {
    json j = header("qudit.optimization_report");
    j["g"] = r.g;
    j["fg"] = r.fg;
    j["leakage"] = r.leakage;
    j["converged"] = r.converged;
    j["best_start"] = r.best_start;
    j["gradient_check_residual"] = r.gradient_check_residual;
    json starts = json::array();
    for (const auto& s : r.starts)
        starts.push_back({{"start", s.start},
                          {"g", s.g},
                          {"fg", s.fg},
                          {"leakage", s.leakage},
                          {"iterations", s.iterations},
                          {"evaluations", s.evaluations},
                          {"stop_reason", s.stop_reason}});
    j["starts"] = starts;
    json trace = json::array();
    for (const auto& t : r.trace)
        trace.push_back({t.start, t.iteration, t.g, t.fg, t.leakage, t.grad_norm});
    j["trace_columns"] = {"start", "iteration", "g", "fg", "leakage", "grad_norm"};
    j["trace"] = trace;
    return j;
}

// ---------------------------------------------------------------- tomography

json chi_to_json(const ProcessMatrix& chi) {
    const auto& pb = process_basis();
    json j = header("qudit.chi");
    j["basis"] = std::vector<std::string>(pb.labels.begin(), pb.labels.end());
    j["chi"] = matrix_json(chi.chi);
    json hinton = json::array();
    for (int m = 0; m < kBasisSize; ++m)
        for (int n = 0; n < kBasisSize; ++n)
            hinton.push_back({m, n, std::abs(chi.chi(m, n)), std::arg(chi.chi(m, n))});
    j["hinton_columns"] = {"m", "n", "magnitude", "phase_rad"};
    j["hinton"] = hinton;
    j["tp_violation"] = chi.tp_violation();
    j["min_eigenvalue"] = chi.min_eigenvalue();
    return j;
}

ProcessMatrix chi_from_json(const json& j) {
    check_format(j, "qudit.chi");
    const auto& pb = process_basis();
    const auto labels = get_as<std::vector<std::string>>(j, "basis");
    if (labels != std::vector<std::string>(pb.labels.begin(), pb.labels.end()))
        throw SchemaError("field 'basis' does not match the expected basis order");
    ProcessMatrix p;
    p.chi = matrix_from_json(j, "chi");
    if (p.chi.rows() != kBasisSize || p.chi.cols() != kBasisSize) throw SchemaError("field 'chi' must be 9 x 9");
    return p;
}

json fit_diagnostics_to_json(const FitDiagnostics& d) {
    return json{{"residual_sum_squares", d.residual_sum_squares},
                {"residual_rms", d.residual_rms},
                {"tp_violation", d.tp_violation},
                {"jacobian_condition", d.jacobian_condition},
                {"jacobian_rank", d.jacobian_rank},
                {"parameters", d.parameters},
                {"identifiability_warning", d.identifiability_warning},
                {"converged", d.converged},
                {"iterations", d.iterations},
                {"stop_reason", d.stop_reason}};
}

json fidelity_report_to_json(const FidelityReport& r) {
    return json{{"entanglement_fidelity_by_level",
                 std::vector<double>(r.entanglement_by_level.begin(), r.entanglement_by_level.end())},
                {"entanglement_fidelity", r.entanglement_fidelity},
                {"average_gate_fidelity", r.average_gate_fidelity},
                {"standard_error", r.standard_error},
                {"gate_fidelity_from_entanglement", r.gate_fidelity_from_entanglement},
                {"samples", r.samples},
                {"seed", r.seed},
                {"method", r.method}};
}

// ---------------------------------------------------------------- json files

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + " is not valid JSON: " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- pulse / waveform

void write_pulse(const fs::path& path, const ControlPulse& pulse) {
    auto out = open_out(path);
    out << "# complex drive envelope, one sample per line: re im (rad/ns)\n"
        << "format = qudit.pulse\n"
        << "schema_version = " << kSchemaVersion << '\n'
        << "frame = " << (pulse.frame == PulseFrame::rotating ? "rotating" : "lab") << '\n'
        << "dt_ns = " << format_double(pulse.dt_ns) << '\n'
        << "gate_time_ns = " << format_double(pulse.gate_time_ns()) << '\n'
        << "samples = " << pulse.size() << '\n'
        << "units = rad_per_ns\n"
        << "---\n";
    for (const auto& s : pulse.samples) out << sci(s.real()) << ' ' << sci(s.imag()) << '\n';
}

ControlPulse read_pulse(const fs::path& path) {
    TextFile tf = read_text(path, "qudit.pulse");
    ControlPulse p;
    const auto& frame = header_value(tf, "frame");
    if (frame == "rotating")
        p.frame = PulseFrame::rotating;
    else if (frame == "lab")
        p.frame = PulseFrame::lab;
    else
        throw FormatError("unknown pulse frame '" + frame + "'");
    p.dt_ns = parse_double(header_value(tf, "dt_ns"), "dt_ns");
    if (!(p.dt_ns > 0.0)) throw FormatError("dt_ns must be positive");
    const auto n = parse_int(header_value(tf, "samples"), "samples");
    if (n < 0 || static_cast<std::size_t>(n) != tf.body.size())
        throw FormatError("pulse header declares " + std::to_string(n) + " samples but the body holds " +
                          std::to_string(tf.body.size()));
    for (const auto& line : tf.body) {
        std::istringstream ls(line);
        std::string re, im, extra;
        if (!(ls >> re >> im) || (ls >> extra)) throw FormatError("malformed pulse sample line '" + line + "'");
        p.samples.emplace_back(parse_double(re, "sample"), parse_double(im, "sample"));
    }
    return p;
}

void export_waveform(const LabWaveform& wave, const fs::path& path) {
    auto out = open_out(path);
    out << "# laboratory-frame drive s(t) at t_k = k / sample_rate, one sample per line (rad/ns)\n"
        << "format = qudit.waveform\n"
        << "schema_version = " << kSchemaVersion << '\n'
        << "frame = lab\n"
        << "sample_rate_per_ns = " << format_double(wave.sample_rate_per_ns) << '\n'
        << "duration_ns = " << format_double(wave.duration_ns) << '\n'
        << "samples = " << wave.samples.size() << '\n'
        << "carrier_ghz = " << format_double(wave.carrier_ghz) << '\n'
        << "scale_volts_per_rad_per_ns = " << format_double(wave.scale_volts) << '\n'
        << "units = rad_per_ns\n"
        << "---\n";
    for (double s : wave.samples) out << sci(s) << '\n';
}

LabWaveform import_waveform(const fs::path& path) {
    TextFile tf = read_text(path, "qudit.waveform");
    if (header_value(tf, "frame") != "lab") throw FormatError("waveform frame must be 'lab'");
    LabWaveform w;
    w.sample_rate_per_ns = parse_double(header_value(tf, "sample_rate_per_ns"), "sample_rate_per_ns");
    w.duration_ns = parse_double(header_value(tf, "duration_ns"), "duration_ns");
    w.carrier_ghz = parse_double(header_value(tf, "carrier_ghz"), "carrier_ghz");
    w.scale_volts = parse_double(header_value(tf, "scale_volts_per_rad_per_ns"), "scale_volts_per_rad_per_ns");
    if (!(w.sample_rate_per_ns > 0.0) || !(w.duration_ns >= 0.0))
        throw FormatError("sample rate must be positive and duration non-negative");
    const auto n = parse_int(header_value(tf, "samples"), "samples");
    const auto expected = std::llround(w.duration_ns * w.sample_rate_per_ns);
    if (n != expected)
        throw FormatError("header declares " + std::to_string(n) + " samples but duration x rate gives " +
                          std::to_string(expected));
    if (static_cast<std::size_t>(n) != tf.body.size())
        throw FormatError("length mismatch: header declares " + std::to_string(n) + " samples, body holds " +
                          std::to_string(tf.body.size()));
    w.samples.reserve(tf.body.size());
    for (const auto& line : tf.body) w.samples.push_back(parse_double(line, "sample"));
    return w;
}

// ---------------------------------------------------------------- CSV

void write_trajectory_csv(const fs::path& path, const std::vector<double>& times_ns,
                          const std::vector<RVec>& populations) {
    if (times_ns.size() != populations.size()) throw FormatError("times and populations differ in length");
    auto out = open_out(path);
    const Eigen::Index d = populations.empty() ? 0 : populations[0].size();
    out << "time_ns";
    for (Eigen::Index k = 0; k < d; ++k) out << ",p" << k;
    out << '\n';
    for (std::size_t i = 0; i < times_ns.size(); ++i) {
        out << format_double(times_ns[i]);
        for (Eigen::Index k = 0; k < d; ++k) out << ',' << format_double(populations[i][k]);
        out << '\n';
    }
}

std::pair<std::vector<double>, std::vector<RVec>> read_trajectory_csv(const fs::path& path) {
    std::vector<std::string> cols;
    auto rows = read_csv_table(path, "time_ns", cols);
    std::pair<std::vector<double>, std::vector<RVec>> out;
    for (const auto& r : rows) {
        out.first.push_back(r[0]);
        out.second.push_back(Eigen::Map<const RVec>(r.data() + 1, static_cast<Eigen::Index>(r.size() - 1)));
    }
    return out;
}

void write_repeated_csv(const fs::path& path, const std::vector<RVec>& populations) {
    auto out = open_out(path);
    const Eigen::Index d = populations.empty() ? 0 : populations[0].size();
    out << "rep";
    for (Eigen::Index k = 0; k < d; ++k) out << ",p" << k;
    out << '\n';
    for (std::size_t i = 0; i < populations.size(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < d; ++k) out << ',' << format_double(populations[i][k]);
        out << '\n';
    }
}

std::vector<RVec> read_repeated_csv(const fs::path& path) {
    std::vector<std::string> cols;
    auto rows = read_csv_table(path, "rep", cols);
    std::vector<RVec> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][0] != static_cast<double>(i))
            throw FormatError(path.string() + " repetitions must count up from 0");
        out.push_back(Eigen::Map<const RVec>(rows[i].data() + 1, static_cast<Eigen::Index>(rows[i].size() - 1)));
    }
    return out;
}

void write_scalogram_csv(const fs::path& path, const Scalogram& s, int time_stride) {
    if (time_stride < 1) throw FormatError("time stride must be >= 1");
    auto out = open_out(path);
    out << "time_ns,freq_ghz,magnitude\n";
    for (std::size_t t = 0; t < s.times_ns.size(); t += static_cast<std::size_t>(time_stride))
        for (std::size_t f = 0; f < s.freqs_ghz.size(); ++f)
            out << format_double(s.times_ns[t]) << ',' << format_double(s.freqs_ghz[f]) << ','
                << format_double(s.magnitude(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(t))) << '\n';
}

void write_linecuts_csv(const fs::path& path, const Scalogram& s) {
    RVec e = s.mean_energy();
    auto peaks = peak_indices(e);
    std::vector<int> rank(s.freqs_ghz.size(), 0);
    for (std::size_t i = 0; i < peaks.size(); ++i) rank[peaks[i]] = static_cast<int>(i) + 1;
    auto out = open_out(path);
    out << "freq_ghz,mean_energy,peak_rank\n";
    for (std::size_t f = 0; f < s.freqs_ghz.size(); ++f)
        out << format_double(s.freqs_ghz[f]) << ',' << format_double(e[static_cast<Eigen::Index>(f)]) << ','
            << rank[f] << '\n';
}

// ---------------------------------------------------------------- digests

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw FormatError("SHA-256 computation failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

FileDigest digest_of(const fs::path& path) { return FileDigest{path.generic_string(), sha256_file(path)}; }

json manifest_to_json(const RunManifest& m) {
    json j = header("qudit.manifest");
    j["command"] = m.command;
    j["tool_version"] = m.tool_version;
    j["seed"] = m.seed;
    auto list = [](const std::vector<FileDigest>& v) {
        json a = json::array();
        for (const auto& d : v) a.push_back({{"path", d.path}, {"sha256", d.sha256}});
        return a;
    };
    j["inputs"] = list(m.inputs);
    j["outputs"] = list(m.outputs);
    return j;
}

RunManifest manifest_from_json(const json& j) {
    check_format(j, "qudit.manifest");
    RunManifest m;
    m.command = get_as<std::string>(j, "command");
    m.tool_version = get_as<std::string>(j, "tool_version");
    m.seed = get_as<std::uint64_t>(j, "seed");
    auto list = [](const json& a, const char* name) {
        if (!a.is_array()) throw SchemaError("field '" + std::string(name) + "' must be an array");
        std::vector<FileDigest> v;
        for (const auto& d : a) v.push_back({get_as<std::string>(d, "path"), get_as<std::string>(d, "sha256")});
        return v;
    };
    m.inputs = list(field(j, "inputs"), "inputs");
    m.outputs = list(field(j, "outputs"), "outputs");
    return m;
}

}  // namespace qudit::io
