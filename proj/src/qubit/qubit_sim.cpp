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

#include "driftlock/qubit/qubit_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"

namespace driftlock::qubit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_covered(const noise::NoiseTrace &noise, double last_timestamp) {
    if (last_timestamp < 0) {
        throw ConfigError("simulation start time must be >= 0");
    }
    // index_at throws the DurationError with the required span.
    (void)noise.index_at(last_timestamp);
}

}  // namespace

void QubitParams::validate() const {
    if (!(rabi_frequency > 0)) throw ConfigError("qubit: rabi_frequency must be > 0");
    if (!(t2_rabi > 0)) throw ConfigError("qubit: t2_rabi must be > 0");
    if (!(beta_vis >= 0 && beta_vis <= 1)) throw ConfigError("qubit: beta_vis must lie in [0, 1]");
    if (!(std::abs(alpha) + beta_vis <= 1 + 1e-12)) {
        throw ConfigError("qubit: |alpha| + beta_vis must be <= 1");
    }
    if (!(readout_fidelity_down >= 0.5 && readout_fidelity_down <= 1)) {
        throw ConfigError("qubit: readout_fidelity_down must lie in [0.5, 1]");
    }
    if (!(readout_fidelity_up >= 0.5 && readout_fidelity_up <= 1)) {
        throw ConfigError("qubit: readout_fidelity_up must lie in [0.5, 1]");
    }
    if (!(extra_dephasing_time > 0)) throw ConfigError("qubit: extra_dephasing_time must be > 0");
}

void ShotTiming::validate() const {
    if (!(manipulation_and_wait >= 0 && readout >= 0 && calculation >= 0)) {
        throw ConfigError("timing: durations must be >= 0");
    }
    if (!(shot_period() > 0)) throw ConfigError("timing: shot period must be > 0");
}

double ramsey_probability(double detuning, double t, const QubitParams &params) {
    double fringe = params.beta_vis * std::cos(kTwoPi * detuning * t + params.theta);
    if (std::isfinite(params.extra_dephasing_time)) {
        fringe *= std::exp(-t / params.extra_dephasing_time);
    }
    const double p_down = std::clamp(0.5 * (1.0 + params.alpha + fringe), 0.0, 1.0);
    const double p = p_down * params.readout_fidelity_down + (1.0 - p_down) * (1.0 - params.readout_fidelity_up);
    return std::clamp(p, 0.0, 1.0);
}

double rabi_probability(double rabi_freq, double detuning, double t, double t2_rabi) {
    const double omega2 = rabi_freq * rabi_freq;
    const double total2 = omega2 + detuning * detuning;
    if (total2 == 0.0) return 0.0;
    const double envelope = std::isfinite(t2_rabi) ? std::exp(-t / t2_rabi) : 1.0;
    const double p = 0.5 * omega2 / total2 * (1.0 - std::cos(kTwoPi * std::sqrt(total2) * t) * envelope);
    return std::clamp(p, 0.0, 1.0);
}

double report_up_probability(double p_up, const QubitParams &params) {
    return std::clamp(p_up * params.readout_fidelity_up + (1.0 - p_up) * (1.0 - params.readout_fidelity_down),
                      0.0, 1.0);
}

int sample_shot(double p_report_down, Rng &rng) {
    // 53-bit uniform in [0, 1); p = 1 always wins, p = 0 never does.
    const double u = std::generate_canonical<double, 53>(rng);
    return u < p_report_down ? +1 : -1;
}

std::vector<double> RamseyMap::mean_probability() const {
    std::vector<double> mean(cols, 0.0);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) mean[c] += p(r, c);
    }
    for (double &m : mean) m /= static_cast<double>(rows);
    return mean;
}

std::vector<double> RamseyMap::mean_down_fraction() const {
    std::vector<double> mean(cols, 0.0);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) mean[c] += outcome(r, c) > 0 ? 1.0 : 0.0;
    }
    for (double &m : mean) m /= static_cast<double>(rows);
    return mean;
}

RamseyMap simulate_repeated_ramsey(const noise::NoiseTrace &noise, const QubitParams &params,
                                   const ShotTiming &timing, double t_max, double t_step,
                                   size_t repetitions, std::uint64_t seed, const RamseyMapOptions &options) {
    params.validate();
    timing.validate();
    if (!(t_step > 0) || !(t_max >= t_step)) {
        throw ConfigError("repeated ramsey: need t_max >= t_step > 0");
    }
    if (repetitions < 1) throw ConfigError("repeated ramsey: repetitions must be >= 1");

    RamseyMap map;
    map.cols = static_cast<size_t>(std::floor(t_max / t_step + 1e-9));
    map.rows = repetitions;
    const double shot = timing.shot_period();
    map.shot_period = shot;
    const double row_span = static_cast<double>(map.cols) * shot;
    const double row_period = options.row_period > 0 ? options.row_period : row_span;
    if (row_period < row_span * (1 - 1e-12)) {
        throw ConfigError("repeated ramsey: row_period " + format_double(row_period) +
                          " s is shorter than one row of shots (" + format_double(row_span) + " s)");
    }
    const auto timestamp = [&](size_t r, size_t c) {
        return options.start_time + static_cast<double>(r) * row_period + static_cast<double>(c) * shot;
    };
    require_covered(noise, timestamp(map.rows - 1, map.cols - 1));

    for (size_t c = 0; c < map.cols; ++c) map.evolution_times.push_back(static_cast<double>(c + 1) * t_step);
    map.row_times.resize(map.rows);
    map.probability.resize(map.rows * map.cols);
    map.outcomes.resize(map.rows * map.cols);
    for (size_t r = 0; r < map.rows; ++r) {
        Rng rng = stream_rng(seed, streams::kRamseyRow + r);
        map.row_times[r] = timestamp(r, 0);
        for (size_t c = 0; c < map.cols; ++c) {
            const double detuning = options.mw_detuning + noise.at(timestamp(r, c));
            const double p = ramsey_probability(detuning, map.evolution_times[c], params);
            map.probability[r * map.cols + c] = p;
            map.outcomes[r * map.cols + c] = sample_shot(p, rng);
        }
    }
    return map;
}

ChevronMap simulate_rabi_chevron(const noise::NoiseTrace &noise, const QubitParams &params,
                                 const ShotTiming &timing, double detuning_span, double t_max,
                                 const ChevronResolution &resolution, std::uint64_t seed,
                                 const ChevronOptions &options) {
    params.validate();
    timing.validate();
    if (resolution.detunings < 2 || resolution.times < 2) {
        throw ConfigError("rabi chevron: resolution must be >= 2 in each axis");
    }
    if (!(detuning_span >= 0) || !(t_max > 0)) {
        throw ConfigError("rabi chevron: need detuning_span >= 0 and t_max > 0");
    }
    if (options.averages < 1) throw ConfigError("rabi chevron: averages must be >= 1");

    const size_t nd = resolution.detunings;
    const size_t nt = resolution.times;
    const double shot = timing.shot_period();
    const auto timestamp = [&](size_t pass, size_t i, size_t j) {
        const size_t index = (pass * nd + i) * nt + j;
        return options.start_time + static_cast<double>(index) * shot;
    };
    require_covered(noise, timestamp(options.averages - 1, nd - 1, nt - 1));

    ChevronMap map;
    for (size_t i = 0; i < nd; ++i) {
        map.detunings.push_back(-0.5 * detuning_span + detuning_span * static_cast<double>(i) / static_cast<double>(nd - 1));
    }
    for (size_t j = 0; j < nt; ++j) {
        map.times.push_back(t_max * static_cast<double>(j) / static_cast<double>(nt - 1));
    }
    map.p_up.assign(nd * nt, 0.0);
    map.up_fraction.assign(nd * nt, 0.0);
    const double inv = 1.0 / static_cast<double>(options.averages);
    for (size_t i = 0; i < nd; ++i) {
        for (size_t j = 0; j < nt; ++j) {
            const size_t cell = i * nt + j;
            Rng rng = stream_rng(seed, streams::kChevronCell + cell);
            double p_sum = 0.0;
            double up = 0.0;
            for (size_t pass = 0; pass < options.averages; ++pass) {
                const double detuning = map.detunings[i] + noise.at(timestamp(pass, i, j));
                const double p = report_up_probability(
                    rabi_probability(params.rabi_frequency, detuning, map.times[j], params.t2_rabi), params);
                p_sum += p;
                // sample_shot draws "down" with its argument; ask for "up" directly.
                up += sample_shot(p, rng) > 0 ? 1.0 : 0.0;
            }
            map.p_up[cell] = p_sum * inv;
            map.up_fraction[cell] = up * inv;
        }
    }
    return map;
}

std::string ramsey_map_csv(const RamseyMap &map) {
    std::vector<std::string> header{"row_time_s/t_evolution_s"};
    for (double t : map.evolution_times) header.push_back(format_double(t));
    std::vector<std::string_view> views(header.begin(), header.end());
    CsvWriter out(views);
    std::vector<double> row(map.cols + 1);
    for (size_t r = 0; r < map.rows; ++r) {
        row[0] = map.row_times[r];
        for (size_t c = 0; c < map.cols; ++c) row[c + 1] = map.p(r, c);
        out.row(row);
    }
    return out.text();
}

std::string ramsey_shot_log_csv(const RamseyMap &map) {
    CsvWriter out({"timestamp_s", "t_evolution_s", "outcome"});
    for (size_t r = 0; r < map.rows; ++r) {
        for (size_t c = 0; c < map.cols; ++c) {
            out.row({map.row_times[r] + static_cast<double>(c) * map.shot_period, map.evolution_times[c],
                     static_cast<double>(map.outcome(r, c))});
        }
    }
    return out.text();
}

std::string shot_log_csv(const std::vector<ShotRecord> &shots) {
    CsvWriter out({"timestamp_s", "t_evolution_s", "outcome"});
    for (const ShotRecord &s : shots) {
        out.row({s.timestamp, s.evolution_time, static_cast<double>(s.outcome)});
    }
    return out.text();
}

std::string chevron_csv(const ChevronMap &map) {
    std::vector<std::string> header{"detuning_hz/t_burst_s"};
    for (double t : map.times) header.push_back(format_double(t));
    std::vector<std::string_view> views(header.begin(), header.end());
    CsvWriter out(views);
    std::vector<double> row(map.times.size() + 1);
    for (size_t i = 0; i < map.detunings.size(); ++i) {
        row[0] = map.detunings[i];
        for (size_t j = 0; j < map.times.size(); ++j) row[j + 1] = map.at(i, j);
        out.row(row);
    }
    return out.text();
}

}  // namespace driftlock::qubit
