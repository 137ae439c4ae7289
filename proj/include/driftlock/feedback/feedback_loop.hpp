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
#include <optional>
#include <string>
#include <vector>

#include "driftlock/estimator/session.hpp"
#include "driftlock/noise/noise_models.hpp"
#include "driftlock/qubit/qubit_sim.hpp"

namespace driftlock::feedback {

enum class Mode { open, closed };

// Ramsey shots run in each cycle's operation window, after the correction,
// to record the fringe the corrected qubit actually shows.
struct OperationRamsey {
    size_t shots_per_cycle = 0;  // 0 disables
    size_t n_points = 100;       // evolution times t_step, 2 t_step, ..., n_points t_step
    double t_step = 40e-9;       // s
    double mw_offset = 0.0;      // Hz, extra drive offset during these shots
};

struct FeedbackConfig {
    size_t n_shots = 100;
    double t_step = 40e-9;   // s
    double t_max = 0.0;      // s; 0 means n_shots * t_step
    qubit::ShotTiming timing;
    double f_target = 2e6;   // Hz
    Mode mode = Mode::closed;
    double passive_epsilon_mV = -6.0;
    size_t n_cycles = 1;
    double cycle_period = 0.0;  // s; 0 means n_shots * (manipulation + readout + calculation)
    double start_time = 0.0;    // s
    estimator::GridShape grid;
    estimator::LikelihoodParams likelihood;
    double prior_sigma = 50e3;  // Hz
    OperationRamsey operation;

    void validate() const;
    double effective_t_max() const { return t_max > 0 ? t_max : static_cast<double>(n_shots) * t_step; }
    double evolution_time(size_t k) const;  // k = 1..n_shots
    double cycle_budget() const;
    double probe_duration() const;
};

// Simulated wall clock in integer nanoseconds so that cycle boundaries
// never drift through accumulated rounding.
class SimClock {
public:
    explicit SimClock(double start_seconds = 0.0);
    double seconds() const { return static_cast<double>(ns_) * 1e-9; }
    std::int64_t nanoseconds() const { return ns_; }
    void advance(double seconds);
    void advance_to(std::int64_t ns);

    static std::int64_t to_ns(double seconds);

private:
    std::int64_t ns_;
};

struct ProbeResult {
    double f_est = 0.0;
    double posterior_sigma = 0.0;
    double true_mean_detuning = 0.0;
    bool degenerate = false;
    std::vector<qubit::ShotRecord> shots;
};

// f_mw is the drive frequency relative to the qubit's reference frequency;
// the measured detuning is delta_f(t) - f_mw.
ProbeResult run_probe(const noise::NoiseTrace &noise, const qubit::QubitParams &params,
                      estimator::EstimatorSession &session, const FeedbackConfig &cfg, double f_mw,
                      SimClock &clock, Rng &rng);

double apply_correction(double f_mw, double f_est, double f_target);

struct CycleLog {
    size_t cycle_index = 0;
    double start_time = 0.0;          // s
    double f_est = 0.0;               // Hz
    double correction_applied = 0.0;  // Hz
    double true_mean_detuning = 0.0;  // Hz
    double posterior_sigma = 0.0;     // Hz
    bool degenerate = false;
    std::vector<qubit::ShotRecord> shots;
    double compute_seconds = 0.0;     // diagnostic, never exported
};

struct OperationCurve {
    std::vector<double> times;             // s
    std::vector<double> mean_probability;  // reported-down probability
    std::vector<double> down_fraction;
    std::vector<size_t> counts;
};

struct ExperimentResult {
    std::vector<CycleLog> cycles;
    OperationCurve operation;
    double total_duration = 0.0;  // s
    std::vector<std::string> warnings;
};

ExperimentResult run_experiment(const FeedbackConfig &cfg, const noise::NoiseStack &noise,
                                const qubit::QubitParams &params, std::uint64_t seed);

// Unit-visibility Cramer-Rao bound on f for the probe schedule, Hz.
double probe_crb(const FeedbackConfig &cfg);

// `cycle,start_time_s,f_est_hz,correction_hz,true_detuning_hz`
std::string cycle_log_csv(const std::vector<CycleLog> &cycles);
// `t_evolution_s,mean_probability_down,down_fraction,shots`
std::string operation_curve_csv(const OperationCurve &curve);

}  // namespace driftlock::feedback
