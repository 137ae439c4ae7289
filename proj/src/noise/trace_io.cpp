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

#include "driftlock/noise/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/units.hpp"

namespace driftlock::noise {

std::string trace_to_csv(const NoiseTrace &trace) {
    CsvWriter out({"time_s", "delta_f_hz"});
    for (size_t j = 0; j < trace.samples.size(); ++j) {
        out.row({static_cast<double>(j) * trace.dt, trace.samples[j]});
    }
    return out.text();
}

NoiseTrace trace_from_csv(const std::filesystem::path &path) {
    const CsvTable table = read_csv(path);
    const size_t ct = table.column("time_s");
    const size_t cf = table.column("delta_f_hz");
    if (table.rows.size() < 2) {
        throw ConfigError(path.string() + ": a trace needs at least two rows to define dt");
    }
    NoiseTrace trace;
    trace.descriptor = "csv(" + path.filename().string() + ")";
    trace.samples.reserve(table.rows.size());
    std::vector<double> times;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const std::string where = path.string() + ":" + std::to_string(table.line_numbers[i]);
        times.push_back(parse_number(table.rows[i][ct], where + " time_s"));
        trace.samples.push_back(parse_number(table.rows[i][cf], where + " delta_f_hz"));
    }
    trace.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    for (size_t i = 1; i < times.size(); ++i) {
        if (std::abs(times[i] - times[i - 1] - trace.dt) > 1e-6 * trace.dt) {
            throw ConfigError(path.string() + ":" + std::to_string(table.line_numbers[i]) +
                              ": time_s is not uniformly spaced");
        }
    }
    trace.validate();
    return trace;
}

std::string trace_to_json(const NoiseTrace &trace) {
    nlohmann::ordered_json j;
    j["dt_s"] = trace.dt;
    j["seed"] = trace.seed;
    j["descriptor"] = trace.descriptor;
    j["samples_hz"] = trace.samples;
    return j.dump() + "\n";
}

NoiseTrace trace_from_json(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    NoiseTrace trace;
    try {
        trace.dt = j.at("dt_s").get<double>();
        trace.seed = j.at("seed").get<std::uint64_t>();
        trace.descriptor = j.at("descriptor").get<std::string>();
        trace.samples = j.at("samples_hz").get<std::vector<double>>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    trace.validate();
    return trace;
}

}  // namespace driftlock::noise
