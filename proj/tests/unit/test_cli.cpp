// Copyright 2026 The Driftlock Authors
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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "driftlock/cli/config.hpp"
#include "driftlock/cli/scenarios.hpp"
#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"

#ifndef DRIFTLOCK_SOURCE_DIR
#define DRIFTLOCK_SOURCE_DIR "."
#endif

namespace dl = driftlock;
namespace fs = std::filesystem;
using dl::cli::Config;

namespace {

const char *kPredict = R"(scenario = predict-t2
seed = 7
spectrum.amplitude_A = 0.00296 MHz^2/Hz, 0.00175 MHz^2/Hz
spectrum.exponent_beta = 1.34, 1.17
)";

const char *kNoise = R"(scenario = synthesize-noise
seed = 1
noise.amplitude_A = 0.00296 MHz^2/Hz
noise.exponent_beta = 1.34
noise.dt = 1 ms
noise.duration = 4 s
)";

dl::cli::ScenarioOutput run(const std::string &text) {
    Config cfg = Config::parse(text, "test.conf");
    return dl::cli::run_scenario(cfg);
}

std::string error_of(const std::string &text) {
    try {
        run(text);
    } catch (const dl::ConfigError &e) {
        return e.what();
    }
    return {};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string &name) {
    const fs::path d = fs::temp_directory_path() / ("driftlock_test_cli_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST(Scenarios, EightAreRegistered) {
    const auto names = dl::cli::scenario_names();
    const std::set<std::string_view> got(names.begin(), names.end());
    for (const char *n : {"synthesize-noise", "repeated-ramsey", "rabi-chevron", "feedback-run", "psd-analysis",
                          "diffusion-analysis", "predict-t2", "gst-violation"}) {
        EXPECT_TRUE(got.contains(n)) << n;
    }
}

TEST(Scenarios, ManifestListsEveryOutput) {
    const auto out = run(kPredict);
    const auto manifest = nlohmann::json::parse(out.manifest_json());
    EXPECT_EQ(manifest["scenario"], "predict-t2");
    EXPECT_EQ(manifest["seed"], 7);
    EXPECT_EQ(manifest["version"], DRIFTLOCK_VERSION);
    std::set<std::string> listed;
    for (const auto &o : manifest["outputs"]) listed.insert(o.get<std::string>());
    for (const auto &[name, text] : out.files) EXPECT_TRUE(listed.contains(name)) << name;
    EXPECT_TRUE(listed.contains("summary.json"));
    EXPECT_EQ(listed.size(), out.files.size() + 1);
    EXPECT_TRUE(manifest["config"].contains("spectrum.amplitude_A"));

    const fs::path dir = fresh_dir("manifest");
    dl::cli::write_output(out, dir);
    for (const auto &name : listed) EXPECT_TRUE(fs::exists(dir / name)) << name;
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["scenario"], "predict-t2");
    EXPECT_EQ(summary["seed"], 7);
    fs::remove_all(dir);
}

TEST(Scenarios, PredictionsCsvHeader) {
    const auto out = run(kPredict);
    bool found = false;
    for (const auto &[name, text] : out.files) {
        if (name != "predictions.csv") continue;
        found = true;
        const auto t = dl::parse_csv(text, name);
        EXPECT_NO_THROW(t.column("t2_star_s"));
        EXPECT_EQ(t.rows.size(), 2u * 2u);  // two spectra, both modes
    }
    EXPECT_TRUE(found);
}

TEST(Scenarios, SameSeedSameBytes) {
    const auto a = run(kNoise), b = run(kNoise);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i], b.files[i]);
    EXPECT_EQ(a.manifest_json(), b.manifest_json());
    EXPECT_EQ(a.summary_json(), b.summary_json());
    std::string other = kNoise;
    other.replace(other.find("seed = 1"), 8, "seed = 2");
    const auto c = run(other);
    EXPECT_NE(a.files[0].second, c.files[0].second);
}

TEST(Scenarios, OutputDirectoryDoesNotChangeManifest) {
    const auto a = run(kPredict);
    const auto b = run(std::string(kPredict) + "output_directory = elsewhere\n");
    EXPECT_EQ(b.output_directory, "elsewhere");
    EXPECT_EQ(a.manifest_json(), b.manifest_json());
}

TEST(Scenarios, ConfigErrorsSurface) {
    EXPECT_NE(error_of("scenario = predict-t2\nspectrum.amplitude_A = 1 Hz^2/Hz\nspectrum.exponent_beta = 1\n")
                  .find("seed"),
              std::string::npos);
    const std::string unknown = error_of(std::string(kPredict) + "spectrum.typo = 3\n");
    EXPECT_NE(unknown.find("spectrum.typo"), std::string::npos) << unknown;
    const std::string scen = error_of("scenario = nope\nseed = 1\n");
    EXPECT_NE(scen.find("unknown scenario"), std::string::npos) << scen;
    const std::string unit = error_of("scenario = feedback-run\nseed = 1\nnoise.amplitude_A = 0.00175 MHz^2/Hz\n"
                                      "noise.exponent_beta = 1.17\nfeedback.f_target = 2\n");
    EXPECT_NE(unit.find("feedback.f_target"), std::string::npos) << unit;
    EXPECT_NE(unit.find("missing unit"), std::string::npos) << unit;
    const std::string range = error_of("scenario = synthesize-noise\nseed = 1\nnoise.amplitude_A = 1 Hz^2/Hz\n"
                                       "noise.exponent_beta = -1\n");
    EXPECT_NE(range.find("noise.exponent_beta"), std::string::npos) << range;
    EXPECT_NE(range.find("range invariant"), std::string::npos) << range;
}

TEST(Scenarios, DeriveSeedSeparatesRoles) {
    EXPECT_EQ(dl::cli::derive_seed(5, "ramsey.shots"), dl::cli::derive_seed(5, "ramsey.shots"));
    EXPECT_NE(dl::cli::derive_seed(5, "ramsey.shots"), dl::cli::derive_seed(5, "chevron.shots"));
    EXPECT_NE(dl::cli::derive_seed(5, "noise.powerlaw"), dl::cli::derive_seed(6, "noise.powerlaw"));
}

TEST(Scenarios, ShippedConfigsParse) {
    for (const auto &entry : fs::directory_iterator(fs::path(DRIFTLOCK_SOURCE_DIR) / "configs")) {
        const auto ext = entry.path().extension();
        if (ext != ".conf" && ext != ".json") continue;
        Config cfg = Config::load(entry.path());
        EXPECT_TRUE(cfg.has("scenario")) << entry.path();
        EXPECT_TRUE(cfg.has("seed")) << entry.path();
    }
}

#ifdef DRIFTLOCK_CLI
TEST(Cli, RunsShippedConfigWithOverrides) {
    const fs::path dir = fresh_dir("binary");
    const std::string cmd = std::string("\"") + DRIFTLOCK_CLI + "\" --config \"" + DRIFTLOCK_SOURCE_DIR +
                            "/configs/predict_t2.conf\" --seed 99 --out \"" + dir.string() + "\" 2>/dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest["seed"], 99);
    for (const auto &o : manifest["outputs"]) EXPECT_TRUE(fs::exists(dir / o.get<std::string>())) << o;
    fs::remove_all(dir);
}

TEST(Cli, BadConfigExitsNonZero) {
    const fs::path dir = fresh_dir("bad");
    fs::create_directories(dir);
    dl::write_text_file(dir / "bad.conf", "scenario = predict-t2\nseed = 1\nspectrum.amplitude_A = 3\n"
                                          "spectrum.exponent_beta = 1\n");
    const std::string cmd = std::string("\"") + DRIFTLOCK_CLI + "\" --config \"" + (dir / "bad.conf").string() +
                            "\" --out \"" + (dir / "out").string() + "\" 2>/dev/null";
    EXPECT_NE(std::system(cmd.c_str()), 0);
    EXPECT_FALSE(fs::exists(dir / "out" / "manifest.json"));
    fs::remove_all(dir);
}
#endif
