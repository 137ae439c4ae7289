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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "driftlock/cli/config.hpp"
#include "driftlock/cli/scenarios.hpp"
#include "driftlock/simd/kernels.hpp"

int main(int argc, char **argv) {
    CLI::App app{"driftlock: qubit frequency-drift simulation and analysis scenarios"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> scenario;
    bool list = false;
    app.add_option("--config", config_path, "scenario config (key = value lines or flat JSON)");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--out", out_dir, "output directory; overrides output_directory");
    app.add_option("--scenario", scenario, "overrides the config scenario");
    app.add_flag("--list-scenarios", list, "print scenario names and exit");
    app.set_version_flag("--version", std::string(DRIFTLOCK_VERSION));
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (auto name : driftlock::cli::scenario_names()) std::cout << name << "\n";
        return 0;
    }
    if (config_path.empty()) {
        std::cerr << "driftlock: --config is required\n";
        return 2;
    }

    try {
        auto cfg = driftlock::cli::Config::load(config_path);
        if (seed) cfg.set("seed", std::to_string(*seed), "command line override");
        if (scenario) cfg.set("scenario", *scenario, "command line override");
        const auto out = driftlock::cli::run_scenario(cfg);
        const std::filesystem::path dir = out_dir ? *out_dir : out.output_directory;
        driftlock::cli::write_output(out, dir);
        std::cerr << "driftlock: " << out.scenario << " wrote " << out.files.size() + 2 << " files to " << dir.string()
                  << " (kernels: " << driftlock::simd::active_kernels().name << ")\n";
    } catch (const std::exception &e) {
        std::cerr << "driftlock: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
