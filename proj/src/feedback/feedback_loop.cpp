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

#include "driftlock/feedback/feedback_loop.hpp"

#include <cmath>
#include <numbers>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"

namespace driftlock::feedback {

void FeedbackConfig::validate() const {
    if (n_shots < 1) throw ConfigError("feedback: n_shots must be >= 1");
    if (!(t_step > 0)) throw ConfigError("feedback: t_step must be > 0");
    if (!(t_max >= 0)) throw ConfigError("feedback: t_max must be >= 0");
    if (n_cycles < 1) throw ConfigError("feedback: n_cycles must be >= 1");
    if (!(start_time >= 0)) throw ConfigError("feedback: start_time must be >= 0");
    if (!(prior_sigma > 0)) throw ConfigError("feedback: prior_sigma must be > 0");
    timing.validate();
    grid.validate();
    likelihood.validate();
    if (!(cycle_period >= 0)) throw ConfigError("feedback: cycle_period must be >= 0");
    const double needed = probe_duration() + static_cast<double>(operation.shots_per_cycle) * timing.shot_period();
    if (SimClock::to_ns(cycle_budget()) < SimClock::to_ns(needed)) {
        throw ConfigError("feedback: cycle budget " + format_double(cycle_budget()) +
                          " s is shorter than probe plus operation shots (" + format_double(needed) + " s)");
    }
    if (operation.shots_per_cycle > 0) {
        if (operation.n_points < 1) throw ConfigError("feedback: operation n_points must be >= 1");
        if (!(operation.t_step > 0)) throw ConfigError("feedback: operation t_step must be > 0");
    }
}

double FeedbackConfig::evolution_time(size_t k) const {
    return static_cast<double>(k) * effective_t_max() / static_cast<double>(n_shots);
}

double FeedbackConfig::cycle_budget() const {
    if (cycle_period > 0) return cycle_period;
    return static_cast<double>(n_shots) * (timing.manipulation_and_wait + timing.readout + timing.calculation);
}

double FeedbackConfig::probe_duration() const {
    return static_cast<double>(n_shots) * timing.shot_period() + timing.calculation;
}

SimClock::SimClock(double start_seconds) : ns_(to_ns(start_seconds)) {}

std::int64_t SimClock::to_ns(double seconds) { return static_cast<std::int64_t>(std::llround(seconds * 1e9)); }

void SimClock::advance(double seconds) {
    const std::int64_t step = to_ns(seconds);
    if (step < 0) throw ConfigError("clock cannot run backwards");
    ns_ += step;
}

void SimClock::advance_to(std::int64_t ns) {
    if (ns < ns_) throw ConfigError("clock cannot run backwards");
    ns_ = ns;
}

ProbeResult run_probe(const noise::NoiseTrace &noise, const qubit::QubitParams &params,
                      estimator::EstimatorSession &session, const FeedbackConfig &cfg, double f_mw,
                      SimClock &clock, Rng &rng) {
    ProbeResult result;
    result.shots.reserve(cfg.n_shots);
    double detuning_sum = 0.0;
    for (size_t k = 1; k <= cfg.n_shots; ++k) {
        const double now = clock.seconds();
        const double detuning = noise.at(now) - f_mw;
        const double t = cfg.evolution_time(k);
        qubit::ShotRecord shot;
        shot.evolution_time = t;
        shot.timestamp = now;
        shot.mw_detuning = -f_mw;
        shot.outcome = qubit::sample_shot(qubit::ramsey_probability(detuning, t, params), rng);
        detuning_sum += detuning;
        if (!result.degenerate) {
            try {
                session.observe(shot);
            } catch (const DegeneratePosteriorError &) {
                result.degenerate = true;
            }
        }
        result.shots.push_back(shot);
        clock.advance(cfg.timing.shot_period());
    }
    clock.advance(cfg.timing.calculation);
    result.true_mean_detuning = detuning_sum / static_cast<double>(cfg.n_shots);
    if (!result.degenerate) {
        result.f_est = session.estimate();
        result.posterior_sigma = session.sigma();
    } else {
        result.f_est = std::nan("");
        result.posterior_sigma = std::nan("");
    }
    return result;
}

double apply_correction(double f_mw, double f_est, double f_target) { return f_mw + (f_est - f_target); }

ExperimentResult run_experiment(const FeedbackConfig &cfg, const noise::NoiseStack &noise,
                                const qubit::QubitParams &params, std::uint64_t seed) {
    cfg.validate();
    params.validate();
    // Manipulation windows see the backaction scaled by the pulsing point;
    // readout windows do not touch the qubit frequency in this model.
    const noise::NoiseTrace trace = noise.effective(cfg.passive_epsilon_mV);
    trace.validate();

    const std::int64_t budget_ns = SimClock::to_ns(cfg.cycle_budget());
    const std::int64_t start_ns = SimClock::to_ns(cfg.start_time);
    const std::int64_t end_ns = start_ns + budget_ns * static_cast<std::int64_t>(cfg.n_cycles);
    {
        // The last shot of the last cycle must still be inside the trace.
        const std::int64_t last_cycle = end_ns - budget_ns;
        const std::int64_t last_probe_shot =
            last_cycle + SimClock::to_ns(static_cast<double>(cfg.n_shots - 1) * cfg.timing.shot_period());
        std::int64_t last_shot = last_probe_shot;
        if (cfg.operation.shots_per_cycle > 0) {
            last_shot = last_cycle + SimClock::to_ns(cfg.probe_duration()) +
                        SimClock::to_ns(static_cast<double>(cfg.operation.shots_per_cycle - 1) *
                                        cfg.timing.shot_period());
        }
        (void)trace.index_at(static_cast<double>(last_shot) * 1e-9);
    }

    ExperimentResult out;
    out.cycles.reserve(cfg.n_cycles);
    if (cfg.operation.shots_per_cycle > 0) {
        for (size_t i = 0; i < cfg.operation.n_points; ++i) {
            out.operation.times.push_back(static_cast<double>(i + 1) * cfg.operation.t_step);
        }
        out.operation.mean_probability.assign(cfg.operation.n_points, 0.0);
        out.operation.down_fraction.assign(cfg.operation.n_points, 0.0);
        out.operation.counts.assign(cfg.operation.n_points, 0);
    }

    estimator::EstimatorSession session(cfg.grid, cfg.likelihood, cfg.prior_sigma);
    double f_mw = -cfg.f_target;
    std::optional<double> prior_mean;
    size_t operation_index = 0;
    SimClock clock(cfg.start_time);
    for (size_t c = 0; c < cfg.n_cycles; ++c) {
        const std::int64_t cycle_start = start_ns + budget_ns * static_cast<std::int64_t>(c);
        clock.advance_to(cycle_start);
        if (auto warning = session.begin_cycle(prior_mean)) {
            out.warnings.push_back("cycle " + std::to_string(c) + ": " + *warning);
        }
        Rng rng = stream_rng(seed, streams::kFeedbackShots + c);
        ProbeResult probe = run_probe(trace, params, session, cfg, f_mw, clock, rng);

        CycleLog log;
        log.cycle_index = c;
        log.start_time = static_cast<double>(cycle_start) * 1e-9;
        log.f_est = probe.f_est;
        log.true_mean_detuning = probe.true_mean_detuning;
        log.posterior_sigma = probe.posterior_sigma;
        log.degenerate = probe.degenerate;
        log.compute_seconds = session.compute_seconds();
        log.shots = std::move(probe.shots);

        if (probe.degenerate) {
            // No feedback on a collapsed posterior; the next cycle starts uniform.
            prior_mean.reset();
        } else {
            if (cfg.mode == Mode::closed) {
                log.correction_applied = probe.f_est - cfg.f_target;
                f_mw = apply_correction(f_mw, probe.f_est, cfg.f_target);
            }
            // Expected detuning next cycle, in the corrected frame.
            prior_mean = probe.f_est - log.correction_applied;
        }

        if (cfg.operation.shots_per_cycle > 0) {
            clock.advance_to(cycle_start + SimClock::to_ns(cfg.probe_duration()));
            Rng op_rng = stream_rng(seed, streams::kFeedbackShots + (std::uint64_t{1} << 40) + c);
            for (size_t s = 0; s < cfg.operation.shots_per_cycle; ++s) {
                const size_t i = operation_index++ % cfg.operation.n_points;
                const double t = out.operation.times[i];
                const double detuning = trace.at(clock.seconds()) - (f_mw + cfg.operation.mw_offset);
                const double p = qubit::ramsey_probability(detuning, t, params);
                out.operation.mean_probability[i] += p;
                out.operation.down_fraction[i] += qubit::sample_shot(p, op_rng) > 0 ? 1.0 : 0.0;
                out.operation.counts[i] += 1;
                clock.advance(cfg.timing.shot_period());
            }
        }
        out.cycles.push_back(std::move(log));
    }
    clock.advance_to(end_ns);
    out.total_duration = static_cast<double>(end_ns - start_ns) * 1e-9;
    for (size_t i = 0; i < out.operation.counts.size(); ++i) {
        if (out.operation.counts[i] > 0) {
            out.operation.mean_probability[i] /= static_cast<double>(out.operation.counts[i]);
            out.operation.down_fraction[i] /= static_cast<double>(out.operation.counts[i]);
        }
    }
    return out;
}

double probe_crb(const FeedbackConfig &cfg) {
    double fisher = 0.0;
    for (size_t k = 1; k <= cfg.n_shots; ++k) {
        const double w = 2.0 * std::numbers::pi * cfg.evolution_time(k);
        fisher += w * w;
    }
    return 1.0 / std::sqrt(fisher);
}

std::string cycle_log_csv(const std::vector<CycleLog> &cycles) {
    CsvWriter out({"cycle", "start_time_s", "f_est_hz", "correction_hz", "true_detuning_hz"});
    for (const CycleLog &c : cycles) {
        out.row({static_cast<double>(c.cycle_index), c.start_time, c.f_est, c.correction_applied,
                 c.true_mean_detuning});
    }
    return out.text();
}

std::string operation_curve_csv(const OperationCurve &curve) {
    CsvWriter out({"t_evolution_s", "mean_probability_down", "down_fraction", "shots"});
    for (size_t i = 0; i < curve.times.size(); ++i) {
        out.row({curve.times[i], curve.mean_probability[i], curve.down_fraction[i],
                 static_cast<double>(curve.counts[i])});
    }
    return out.text();
}

}  // namespace driftlock::feedback
