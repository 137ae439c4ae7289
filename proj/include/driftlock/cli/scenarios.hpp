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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftlock/cli/config.hpp"

namespace driftlock::cli {

std::vector<std::string_view> scenario_names();

// Everything a scenario emits, held in memory until the run succeeds.
struct ScenarioOutput {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string output_directory;  // from the config; --out wins
    std::vector<std::pair<std::string, std::string>> files;  // relative name -> bytes
    nlohmann::ordered_json summary;
    std::vector<std::pair<std::string, std::string>> resolved_config;

    void add(std::string name, std::string text);
    std::string manifest_json() const;
    std::string summary_json() const;
};

// Reads `scenario` and `seed` from cfg, resolves the scenario's keys,
// rejects unknown ones, then runs. Nothing touches the disk.
ScenarioOutput run_scenario(Config &cfg);

// Writes the files, summary.json and manifest.json under dir.
void write_output(const ScenarioOutput &out, const std::filesystem::path &dir);

// Seed of a named consumer: mix64(seed ^ fnv1a(role)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view role);

}  // namespace driftlock::cli
