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
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "qudit/errors.hpp"
#include "qudit/io.hpp"
#include "test_support.hpp"

using namespace qudit;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("qudit_io_" + name); }

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(DeviceFile, RoundTripIsLossless) {
    const DeviceSpec s = reference_device();
    const DeviceSpec r = io::device_from_json(json::parse(io::device_to_json(s).dump()));
    EXPECT_EQ(r.dim, s.dim);
    EXPECT_EQ(r.transition_freqs_ghz, s.transition_freqs_ghz);
    EXPECT_EQ(r.t1_us, s.t1_us);
    EXPECT_EQ(r.t2_us, s.t2_us);
    EXPECT_EQ(r.t2_kind, s.t2_kind);
    EXPECT_EQ(r.t2_ramsey_us, s.t2_ramsey_us);
    EXPECT_EQ(r.guard(), s.guard());
    EXPECT_EQ(r.readout_freq_ghz, s.readout_freq_ghz);
    EXPECT_EQ(r.chi_qc_mhz, s.chi_qc_mhz);
}

TEST(DeviceFile, InfiniteTimesRoundTrip) {
    DeviceSpec s = qudit::testing::two_level_device(4.0, INFINITY, INFINITY);
    const json j = io::device_to_json(s);
    EXPECT_EQ(j["t1_us"][0], "inf");
    const DeviceSpec r = io::device_from_json(j);
    EXPECT_TRUE(std::isinf(r.t1_us[0]));
}

TEST(DeviceFile, SchemaErrorsNameTheField) {
    json j = io::device_to_json(reference_device());
    j.erase("t1_us");
    try {
        io::device_from_json(j);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("t1_us"), std::string::npos);
    }
    json k = io::device_to_json(reference_device());
    k["t1_ms"] = 1.0;
    EXPECT_THROW(io::device_from_json(k), SchemaError);
    json f = io::device_to_json(reference_device());
    f["format"] = "qudit.model";
    EXPECT_THROW(io::device_from_json(f), SchemaError);
    json v = io::device_to_json(reference_device());
    v["schema_version"] = 99;
    EXPECT_THROW(io::device_from_json(v), SchemaError);
    json t = io::device_to_json(reference_device());
    t["t1_us"] = "long";
    EXPECT_THROW(io::device_from_json(t), SchemaError);
}

TEST(ModelFile, RoundTripBothSources) {
    for (const TransmonModel& m : {model_from_spectrum(reference_device()), fit_charge_model(reference_device())}) {
        const TransmonModel r = io::model_from_json(json::parse(io::model_to_json(m).dump()));
        EXPECT_EQ(r.dim, m.dim);
        EXPECT_EQ(r.source, m.source);
        for (int k = 0; k < m.dim; ++k) EXPECT_EQ(r.omega[k], m.omega[k]);
        EXPECT_EQ(max_abs(r.lower - m.lower), 0.0);
        EXPECT_EQ(r.charge_fit.has_value(), m.charge_fit.has_value());
        if (m.charge_fit) {
            EXPECT_EQ(r.charge_fit->ej_ghz, m.charge_fit->ej_ghz);
            EXPECT_EQ(r.charge_fit->ec_ghz, m.charge_fit->ec_ghz);
        }
    }
}

TEST(OptimizeFile, DefaultsAndOverrides) {
    json j = {{"format", "qudit.optimize"}, {"schema_version", 1}, {"target", "swap02"}};
    io::OptimizationJob job = io::optimization_job_from_json(j, 4);
    EXPECT_EQ(job.config.objective.gate_time_ns, 150.0);
    EXPECT_EQ(job.config.objective.guard_weights[3], 1.0);
    j["amplitude_cap_mhz"] = 5.0;
    j["starts"] = 7;
    j["seed"] = 99;
    job = io::optimization_job_from_json(j, 4);
    EXPECT_NEAR(job.config.objective.amplitude_cap, mhz_to_rad_per_ns(5.0), 1e-15);
    EXPECT_EQ(job.config.starts, 7);
    EXPECT_EQ(job.config.seed, 99u);
    const io::OptimizationJob back = io::optimization_job_from_json(io::optimization_job_to_json(job), 4);
    EXPECT_EQ(back.config.starts, 7);
    EXPECT_NEAR(back.config.objective.amplitude_cap, job.config.objective.amplitude_cap, 1e-15);

    json bad = j;
    bad["max_iteration"] = 3;
    EXPECT_THROW(io::optimization_job_from_json(bad, 4), SchemaError);
    bad = j;
    bad["target"] = "cnot";
    EXPECT_THROW(io::optimization_job_from_json(bad, 4), SchemaError);
    bad = j;
    bad.erase("target");
    EXPECT_THROW(io::optimization_job_from_json(bad, 4), SchemaError);
}

TEST(ChiFile, RoundTripAndHintonData) {
    Mat u = Mat::Zero(3, 3);
    u(0, 2) = u(2, 0) = u(1, 1) = 1.0;
    const ProcessMatrix chi = chi_from_unitary(u);
    const json j = io::chi_to_json(chi);
    EXPECT_EQ(j["basis"].size(), 9u);
    EXPECT_EQ(j["basis"][0], "I");
    EXPECT_EQ(j["hinton"].size(), 81u);
    const ProcessMatrix r = io::chi_from_json(json::parse(j.dump()));
    EXPECT_EQ(max_abs(r.chi - chi.chi), 0.0);
}

TEST(PulseFile, RoundTripIsBitExact) {
    const ControlPulse p = qudit::testing::random_pulse(1200, 0.125, 0.03, 12);
    const fs::path path = temp_file("pulse.txt");
    io::write_pulse(path, p);
    const ControlPulse r = io::read_pulse(path);
    ASSERT_EQ(r.size(), p.size());
    EXPECT_EQ(r.dt_ns, p.dt_ns);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(r.samples[i], p.samples[i]);
    fs::remove(path);
}

TEST(PulseFile, MalformedFilesRejected) {
    const fs::path path = temp_file("badpulse.txt");
    write_text(path, "format = qudit.pulse\nschema_version = 1\nframe = rotating\ndt_ns = 0.125\n"
                     "gate_time_ns = 0.25\nsamples = 2\nunits = rad_per_ns\n---\n0 0\n");
    EXPECT_THROW(io::read_pulse(path), FormatError);
    write_text(path, "format = qudit.pulse\nschema_version = 1\nframe = rotating\ndt_ns = 0.125\n"
                     "gate_time_ns = 0.25\nsamples = 2\nunits = rad_per_ns\n---\n0 0\n1 x\n");
    EXPECT_THROW(io::read_pulse(path), FormatError);
    write_text(path, "no header here\n");
    EXPECT_THROW(io::read_pulse(path), FormatError);
    fs::remove(path);
}

TEST(CsvFiles, TrajectoryAndRepetitionRoundTrip) {
    std::vector<double> t = {0.0, 1.0, 2.0};
    std::vector<RVec> p(3, RVec(4));
    p[0] << 1, 0, 0, 0;
    p[1] << 0.1, 0.2, 0.30000000000000004, 0.4;
    p[2] << 1.0 / 3.0, 1e-17, 2.0 / 3.0, 0.0;
    const fs::path a = temp_file("traj.csv");
    io::write_trajectory_csv(a, t, p);
    const auto [tt, pp] = io::read_trajectory_csv(a);
    EXPECT_EQ(tt, t);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ((pp[i] - p[i]).cwiseAbs().maxCoeff(), 0.0);
    std::ifstream in(a);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "time_ns,p0,p1,p2,p3");

    const fs::path b = temp_file("reps.csv");
    io::write_repeated_csv(b, p);
    const auto rr = io::read_repeated_csv(b);
    ASSERT_EQ(rr.size(), 3u);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ((rr[i] - p[i]).cwiseAbs().maxCoeff(), 0.0);

    write_text(b, "rep,p0,p1\n0,1,0\n1,0.5\n");
    EXPECT_THROW(io::read_repeated_csv(b), FormatError);
    write_text(b, "time_ns,p0\n0,1\n");
    EXPECT_THROW(io::read_repeated_csv(b), FormatError);
    fs::remove(a);
    fs::remove(b);
}

TEST(Digest, KnownVectors) {
    EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const fs::path p = temp_file("digest.txt");
    write_text(p, "abc");
    EXPECT_EQ(io::sha256_file(p), io::sha256_hex("abc"));
    fs::remove(p);
}

TEST(Manifest, RoundTrip) {
    io::RunManifest m;
    m.command = "optimize";
    m.seed = 1234567890123ULL;
    m.inputs.push_back({"model.json", io::sha256_hex("x")});
    m.outputs.push_back({"pulse.txt", io::sha256_hex("y")});
    const io::RunManifest r = io::manifest_from_json(json::parse(io::manifest_to_json(m).dump()));
    EXPECT_EQ(r.command, m.command);
    EXPECT_EQ(r.seed, m.seed);
    EXPECT_EQ(r.tool_version, io::kToolVersion);
    ASSERT_EQ(r.outputs.size(), 1u);
    EXPECT_EQ(r.outputs[0].sha256, m.outputs[0].sha256);
}

TEST(Format, DoublesRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 4.09948, -2.5e-300, 6.02e23}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}
