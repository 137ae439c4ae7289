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
#include <limits>
#include <string>
#include <vector>

#include "driftlock/noise/noise_models.hpp"
#include "driftlock/rng.hpp"

namespace driftlock::qubit {

struct QubitParams {
    double rabi_frequency = 5e6;  // Hz
    double t2_rabi = 2.5e-6;      // s
    double alpha = 0.0;
    double beta_vis = 1.0;
    double theta = 0.0;  // rad
    double readout_fidelity_down = 1.0;
    double readout_fidelity_up = 1.0;
    // Optional exp(-t / T) envelope for dephasing faster than the trace resolves.
    double extra_dephasing_time = std::numeric_limits<double>::infinity();  // s

    void validate() const;
};

// outcome: +1 reports spin down, -1 reports spin up.
struct ShotRecord {
    double evolution_time = 0.0;  // s
    int outcome = 1;
    double timestamp = 0.0;       // s
    double mw_detuning = 0.0;     // Hz; measured detuning is mw_detuning + delta_f(timestamp)
};

struct ShotTiming {
    double manipulation_and_wait = 60e-6;  // s
    double readout = 140e-6;               // s
    double calculation = 40e-6;            // s, once per estimation cycle

    void validate() const;
    double shot_period() const { return manipulation_and_wait + readout; }
};

// Probability of reporting spin down after a Ramsey sequence.
double ramsey_probability(double detuning, double t, const QubitParams &params);

// Probability of spin up after a Rabi burst of length t (no readout folding).
double rabi_probability(double rabi_freq, double detuning, double t, double t2_rabi);

// Folds readout errors into the probability of reporting spin up.
double report_up_probability(double p_up, const QubitParams &params);

int sample_shot(double p_report_down, Rng &rng);

struct RamseyMapOptions {
    double mw_detuning = 2e6;  // Hz
    // Start-to-start spacing of rows; 0 packs rows back to back.
    double row_period = 0.0;   // s
    double start_time = 0.0;   // s
};

// rows = repetitions, cols = evolution times t_step, 2 t_step, ...
struct RamseyMap {
    size_t rows = 0;
    size_t cols = 0;
    double shot_period = 0.0;             // s, spacing of shots within a row
    std::vector<double> evolution_times;  // s, size cols
    std::vector<double> row_times;        // s, timestamp of each row's first shot
    std::vector<double> probability;      // reported-down probability, row-major
    std::vector<int> outcomes;            // +1 / -1, row-major

    double p(size_t r, size_t c) const { return probability[r * cols + c]; }
    int outcome(size_t r, size_t c) const { return outcomes[r * cols + c]; }
    std::vector<double> mean_probability() const;
    std::vector<double> mean_down_fraction() const;
};

// Sample j of the map: row r, column c sits at start + r*row_period + c*shot_period.
RamseyMap simulate_repeated_ramsey(const noise::NoiseTrace &noise, const QubitParams &params,
                                   const ShotTiming &timing, double t_max, double t_step,
                                   size_t repetitions, std::uint64_t seed,
                                   const RamseyMapOptions &options = {});

struct ChevronResolution {
    size_t detunings = 41;
    size_t times = 41;
};

struct ChevronOptions {
    size_t averages = 20;
    double start_time = 0.0;  // s
};

struct ChevronMap {
    std::vector<double> detunings;   // Hz
    std::vector<double> times;       // s
    std::vector<double> p_up;        // mean exact P(up) with readout folded, [detuning][time]
    std::vector<double> up_fraction; // fraction of sampled shots reporting up

    double at(size_t i, size_t j) const { return p_up[i * times.size() + j]; }
};

// Detunings span [-span/2, span/2], times [0, t_max], both inclusive. The
// whole grid is swept `averages` times; the noise is read at each shot.
ChevronMap simulate_rabi_chevron(const noise::NoiseTrace &noise, const QubitParams &params,
                                 const ShotTiming &timing, double detuning_span, double t_max,
                                 const ChevronResolution &resolution, std::uint64_t seed,
                                 const ChevronOptions &options = {});

// CSV matrix: header `row_time_s/t_evolution_s,<t_1>,...`, then one row per
// repetition starting with the row timestamp.
std::string ramsey_map_csv(const RamseyMap &map);
// `timestamp_s,t_evolution_s,outcome` in acquisition order.
std::string ramsey_shot_log_csv(const RamseyMap &map);
std::string shot_log_csv(const std::vector<ShotRecord> &shots);
// header `detuning_hz/t_burst_s,<t_1>,...`, one row per detuning.
std::string chevron_csv(const ChevronMap &map);

}  // namespace driftlock::qubit
