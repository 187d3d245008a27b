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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qudit/model.hpp"
#include "qudit/optimize.hpp"
#include "qudit/pulse.hpp"
#include "qudit/tomography.hpp"
#include "qudit/waveform.hpp"

namespace qudit::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Structured files carry {"format": ..., "schema_version": ...}; readers throw
// SchemaError naming the offending field.
json device_to_json(const DeviceSpec& spec);
DeviceSpec device_from_json(const json& j);

json model_to_json(const TransmonModel& model);
TransmonModel model_from_json(const json& j);

/// Optimization config. Every field except `target` is optional; unknown keys
/// are rejected so that typos do not silently fall back to defaults.
struct OptimizationJob {
    OptimizeConfig config;
    std::string target = "swap02";  // swap02 | identity | free_evolution | matrix
    Mat target_matrix;              // when target == "matrix"
};
OptimizationJob optimization_job_from_json(const json& j, int dim);
json optimization_job_to_json(const OptimizationJob& job);
TargetGate make_target(const OptimizationJob& job, const RotatingFrame& frame, int dim);

json optimization_report_to_json(const OptimizationReport& report);

json chi_to_json(const ProcessMatrix& chi);
ProcessMatrix chi_from_json(const json& j);
json fit_diagnostics_to_json(const FitDiagnostics& d);
json fidelity_report_to_json(const FidelityReport& r);

json read_json(const fs::path& path);
/// Two-space indent, sorted keys, trailing newline.
void write_json(const fs::path& path, const json& j);

// Text formats: "key = value" header lines, a "---" separator, then one sample
// per line in %+.17e so that values round-trip exactly.
void write_pulse(const fs::path& path, const ControlPulse& pulse);
ControlPulse read_pulse(const fs::path& path);

void export_waveform(const LabWaveform& wave, const fs::path& path);
LabWaveform import_waveform(const fs::path& path);

/// time_ns,p0,...,p{d-1}
void write_trajectory_csv(const fs::path& path, const std::vector<double>& times_ns,
                          const std::vector<RVec>& populations);
std::pair<std::vector<double>, std::vector<RVec>> read_trajectory_csv(const fs::path& path);

/// rep,p0,...,p{d-1} with rep 0 the initial state.
void write_repeated_csv(const fs::path& path, const std::vector<RVec>& populations);
std::vector<RVec> read_repeated_csv(const fs::path& path);

/// Long-format scalogram (time_ns,freq_ghz,magnitude) keeping every
/// `time_stride`-th time sample, and the time-averaged energy per frequency.
void write_scalogram_csv(const fs::path& path, const Scalogram& s, int time_stride);
void write_linecuts_csv(const fs::path& path, const Scalogram& s);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

struct FileDigest {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
};

FileDigest digest_of(const fs::path& path);
json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

std::string format_double(double v);

}  // namespace qudit::io
