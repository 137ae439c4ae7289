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

#include <cmath>
#include <vector>

#include "driftlock/errors.hpp"
#include "driftlock/feedback/feedback_loop.hpp"
#include "driftlock/noise/noise_models.hpp"
#include "driftlock/qubit/qubit_sim.hpp"
#include "driftlock/spectra/psd.hpp"

namespace dl = driftlock;
namespace fb = driftlock::feedback;

namespace {

dl::noise::NoiseStack constant_stack(double value, double duration, double dt = 2e-4) {
    dl::noise::NoiseStack s;
    s.base.dt = dt;
    s.base.samples.assign(static_cast<size_t>(std::ceil(duration / dt)) + 1, value);
    return s;
}

fb::FeedbackConfig small_config(fb::Mode mode, size_t cycles) {
    fb::FeedbackConfig cfg;
    cfg.mode = mode;
    cfg.n_cycles = cycles;
    return cfg;
}

}  // namespace

TEST(Correction, SignConvention) {
    EXPECT_DOUBLE_EQ(fb::apply_correction(-2e6, 2.1e6, 2e6), -1.9e6);
    EXPECT_DOUBLE_EQ(fb::apply_correction(-2e6, 2e6, 2e6), -2e6);
    // After the correction the measured detuning returns to the target.
    const double delta_f = 100e3;
    const double f_mw = fb::apply_correction(-2e6, delta_f + 2e6, 2e6);
    EXPECT_DOUBLE_EQ(delta_f - f_mw, 2e6);
}

TEST(Config, DefaultTimingBudget) {
    fb::FeedbackConfig cfg;
    EXPECT_NEAR(cfg.cycle_budget(), 24e-3, 1e-15);
    EXPECT_NEAR(cfg.probe_duration(), 20.04e-3, 1e-15);
    EXPECT_NEAR(cfg.evolution_time(1), 40e-9, 1e-22);
    EXPECT_NEAR(cfg.evolution_time(100), 4e-6, 1e-20);
    EXPECT_NEAR(fb::probe_crb(cfg), 6840.33, 0.01);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsBudgetShorterThanProbe) {
    fb::FeedbackConfig cfg;
    cfg.cycle_period = 10e-3;
    EXPECT_THROW(cfg.validate(), dl::ConfigError);
    cfg.cycle_period = 20.04e-3;
    EXPECT_NO_THROW(cfg.validate());
    cfg.operation.shots_per_cycle = 5;
    EXPECT_THROW(cfg.validate(), dl::ConfigError);
}

TEST(Clock, NoDriftOverManyCycles) {
    fb::SimClock clock;
    for (int i = 0; i < 5000; ++i) clock.advance(24e-3);
    EXPECT_EQ(clock.nanoseconds(), 120'000'000'000LL);
    EXPECT_THROW(clock.advance_to(0), dl::ConfigError);
    EXPECT_THROW(clock.advance(-1e-9), dl::ConfigError);
}

TEST(Experiment, ClosedLoopTracksAStaticOffset) {
    const auto noise = constant_stack(300e3, 0.5);
    const auto closed = fb::run_experiment(small_config(fb::Mode::closed, 20), noise, {}, 11);
    const auto open = fb::run_experiment(small_config(fb::Mode::open, 20), noise, {}, 11);
    ASSERT_EQ(closed.cycles.size(), 20u);
    // Cycle 0 sees the full offset in both modes.
    EXPECT_NEAR(closed.cycles[0].true_mean_detuning, 2.3e6, 1e-6);
    EXPECT_NEAR(closed.cycles[0].f_est, 2.3e6, 25e3);
    for (size_t c = 1; c < 20; ++c) {
        EXPECT_NEAR(closed.cycles[c].true_mean_detuning, 2e6, 30e3) << c;
        EXPECT_NEAR(open.cycles[c].true_mean_detuning, 2.3e6, 1e-6) << c;
        EXPECT_EQ(open.cycles[c].correction_applied, 0.0);
    }
    EXPECT_NEAR(closed.total_duration, 20 * 24e-3, 1e-12);
}

TEST(Experiment, CycleStartsOnTheBudgetGrid) {
    const auto noise = constant_stack(0.0, 0.5);
    auto cfg = small_config(fb::Mode::closed, 10);
    cfg.cycle_period = 30e-3;
    const auto r = fb::run_experiment(cfg, noise, {}, 3);
    for (size_t c = 0; c < r.cycles.size(); ++c) {
        EXPECT_NEAR(r.cycles[c].start_time, 30e-3 * static_cast<double>(c), 1e-12);
        EXPECT_NEAR(r.cycles[c].shots.front().timestamp, r.cycles[c].start_time, 1e-12);
        EXPECT_NEAR(r.cycles[c].shots.back().timestamp - r.cycles[c].start_time, 99 * 200e-6, 1e-9);
    }
}

TEST(Experiment, TimestampsStrictlyIncrease) {
    const auto noise = constant_stack(0.0, 1.0);
    auto cfg = small_config(fb::Mode::closed, 15);
    cfg.operation.shots_per_cycle = 15;
    const auto r = fb::run_experiment(cfg, noise, {}, 2);
    double last = -1.0;
    for (const auto &c : r.cycles) {
        for (const auto &s : c.shots) {
            ASSERT_GT(s.timestamp, last);
            last = s.timestamp;
        }
    }
    EXPECT_EQ(fb::SimClock::to_ns(r.total_duration), 15 * fb::SimClock::to_ns(24e-3));
}

TEST(Experiment, DeterministicPerSeed) {
    const auto noise = constant_stack(120e3, 0.5);
    const auto cfg = small_config(fb::Mode::closed, 12);
    const auto a = fb::run_experiment(cfg, noise, {}, 99);
    const auto b = fb::run_experiment(cfg, noise, {}, 99);
    EXPECT_EQ(fb::cycle_log_csv(a.cycles), fb::cycle_log_csv(b.cycles));
}

TEST(Experiment, ShortTraceRejected) {
    const auto noise = constant_stack(0.0, 0.1);
    EXPECT_THROW(fb::run_experiment(small_config(fb::Mode::closed, 10), noise, {}, 1), dl::DurationError);
}

TEST(Experiment, OperationShotsSeeTheTargetFringe) {
    const auto noise = constant_stack(200e3, 1.0);
    auto cfg = small_config(fb::Mode::closed, 30);
    cfg.cycle_period = 30e-3;
    cfg.operation.shots_per_cycle = 20;
    cfg.operation.n_points = 10;
    cfg.operation.t_step = 40e-9;
    const auto r = fb::run_experiment(cfg, noise, {}, 5);
    ASSERT_EQ(r.operation.times.size(), 10u);
    for (size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(r.operation.counts[i], 60u);
        // Locked to 2 MHz within about a bin after cycle 0.
        const double ideal = dl::qubit::ramsey_probability(2e6, r.operation.times[i], {});
        EXPECT_NEAR(r.operation.mean_probability[i], ideal, 0.05) << i;
    }
}

TEST(Experiment, CsvHeader) {
    const auto noise = constant_stack(0.0, 0.1);
    const auto r = fb::run_experiment(small_config(fb::Mode::open, 2), noise, {}, 1);
    const std::string csv = fb::cycle_log_csv(r.cycles);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "cycle,start_time_s,f_est_hz,correction_hz,true_detuning_hz");
}

TEST(Experiment, OpenLoopEstimatesRecoverInjectedSpectrum) {
    // f_est series of an open-loop run, analysed like any measured series.
    const dl::noise::PowerLawSpec injected{1.75e9, 1.17, 1.0 / 300.0, 1e5};
    auto cfg = small_config(fb::Mode::open, 5000);
    const double duration = 5000 * 24e-3 + 0.1;
    dl::spectra::PsdEstimate mean;
    const int seeds = 3;
    for (int k = 0; k < seeds; ++k) {
        dl::noise::NoiseStack stack;
        stack.base = dl::noise::synthesize_powerlaw(injected, duration, 2e-4, 600 + k);
        const auto r = fb::run_experiment(cfg, stack, {}, 700 + k);
        std::vector<double> f;
        for (const auto &c : r.cycles) f.push_back(c.f_est);
        const auto psd = dl::spectra::estimate_psd(f, 24e-3);
        if (k == 0) {
            mean = psd;
        } else {
            for (size_t j = 0; j < psd.power.size(); ++j) mean.power[j] += psd.power[j];
        }
    }
    for (double &p : mean.power) p /= seeds;
    // Upper edge well below the 20.8 Hz Nyquist rate of the cycle series, where aliasing flattens it.
    const auto fit = dl::spectra::fit_powerlaw(mean, 10 * mean.df(), 5.0);
    EXPECT_NEAR(fit.exponent_beta, injected.exponent_beta, 0.1);
    EXPECT_NEAR(fit.amplitude_A / injected.amplitude_A, 1.0, 0.2);
}
