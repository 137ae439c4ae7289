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
#include <filesystem>
#include <vector>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/noise/noise_models.hpp"
#include "driftlock/noise/trace_io.hpp"
#include "driftlock/spectra/psd.hpp"

namespace dl = driftlock;
namespace nz = driftlock::noise;

namespace {

double variance(const std::vector<double> &x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

nz::PowerLawSpec spec(double A, double beta) {
    nz::PowerLawSpec s;
    s.amplitude_A = A;
    s.exponent_beta = beta;
    s.f_low = 1e-3;
    s.f_high = 1e6;
    return s;
}

}  // namespace

TEST(BandPower, ClosedFormAndBetaOne) {
    const auto s = spec(2.0, 0.0);
    EXPECT_NEAR(nz::band_power(s, 1.0, 5.0), 8.0, 1e-12);
    const auto one = spec(3.0, 1.0);
    EXPECT_NEAR(nz::band_power(one, 1.0, std::exp(2.0)), 6.0, 1e-12);
    // continuous through beta = 1
    const double below = nz::band_power(spec(3.0, 1.0 - 1e-9), 0.1, 100.0);
    const double above = nz::band_power(spec(3.0, 1.0 + 1e-9), 0.1, 100.0);
    EXPECT_NEAR(below, nz::band_power(one, 0.1, 100.0), 1e-6);
    EXPECT_NEAR(above, nz::band_power(one, 0.1, 100.0), 1e-6);
}

TEST(SynthesisBand, ClipsAndRejectsEmpty) {
    const auto band = nz::synthesis_band(spec(1.0, 1.0), 10.0, 1e-3);
    EXPECT_DOUBLE_EQ(band.lo, 0.1);
    EXPECT_DOUBLE_EQ(band.hi, 500.0);
    auto narrow = spec(1.0, 1.0);
    narrow.f_high = 0.05;
    EXPECT_THROW(nz::synthesis_band(narrow, 10.0, 1e-3), dl::ConfigError);
}

TEST(PowerLaw, VarianceMatchesBandPowerOverSeeds) {
    for (double beta : {0.5, 1.0, 1.34}) {
        const auto s = spec(1e4, beta);
        const double duration = 65.536, dt = 1e-3;
        const auto band = nz::synthesis_band(s, duration, dt);
        const double expected = nz::band_power(s, band.lo, band.hi);
        double mean_var = 0.0;
        const int seeds = 20;
        for (int k = 0; k < seeds; ++k) mean_var += variance(nz::synthesize_powerlaw(s, duration, dt, 100 + k).samples);
        mean_var /= seeds;
        EXPECT_NEAR(mean_var / expected, 1.0, 0.10) << beta;
    }
}

TEST(PowerLaw, DeterministicAndZeroMean) {
    const auto s = spec(1e4, 1.5);
    const auto a = nz::synthesize_powerlaw(s, 8.192, 1e-3, 42);
    const auto b = nz::synthesize_powerlaw(s, 8.192, 1e-3, 42);
    const auto c = nz::synthesize_powerlaw(s, 8.192, 1e-3, 43);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_NE(a.samples, c.samples);
    double m = 0.0;
    for (double v : a.samples) m += v;
    EXPECT_NEAR(m / static_cast<double>(a.samples.size()), 0.0, 1e-6 * std::sqrt(variance(a.samples)));
    EXPECT_EQ(a.samples.size(), 8192u);
}

TEST(PowerLaw, ZeroAmplitudeGivesZeroTrace) {
    const auto z = nz::synthesize_powerlaw(spec(0.0, 1.0), 1.0, 1e-3, 1);
    for (double v : z.samples) EXPECT_EQ(v, 0.0);
}

TEST(PowerLaw, QuasiStaticOffsetAddsVariance) {
    nz::SynthesisOptions opt;
    opt.quasi_static_sigma = 500.0;
    double acc = 0.0;
    for (int k = 0; k < 400; ++k) {
        const auto t = nz::synthesize_powerlaw(spec(0.0, 1.0), 0.01, 1e-3, 7000 + k, opt);
        acc += t.samples[0] * t.samples[0];
    }
    EXPECT_NEAR(std::sqrt(acc / 400.0), 500.0, 60.0);
}

TEST(PowerLaw, SpectrumSlopeRecovered) {
    // Periodograms of 20 traces of 2^16 samples, averaged bin by bin.
    for (double beta : {0.5, 1.0, 1.5}) {
        const auto s = spec(1e4, beta);
        dl::spectra::PsdEstimate mean;
        const int seeds = 20;
        for (int k = 0; k < seeds; ++k) {
            const auto t = nz::synthesize_powerlaw(s, 65.536, 1e-3, 900 + k);
            const auto psd = dl::spectra::estimate_psd(t.samples, t.dt);
            if (k == 0) {
                mean = psd;
            } else {
                for (size_t j = 0; j < psd.power.size(); ++j) mean.power[j] += psd.power[j];
            }
        }
        for (double &p : mean.power) p /= seeds;
        const auto fit = dl::spectra::fit_powerlaw(mean, 10.0 * mean.df(), 250.0);
        EXPECT_NEAR(fit.exponent_beta, beta, 0.1) << beta;
        EXPECT_NEAR(fit.amplitude_A / 1e4, 1.0, 0.2) << beta;
    }
}

TEST(Telegraph, TwoLevelsAndSwitchingRate) {
    nz::TelegraphSpec tel{2.0, 5.0};
    const auto t = nz::synthesize_telegraph(tel, 200.0, 1e-3, 3);
    size_t flips = 0;
    for (size_t j = 0; j < t.samples.size(); ++j) {
        EXPECT_EQ(std::abs(t.samples[j]), 2.0);
        if (j && t.samples[j] != t.samples[j - 1]) ++flips;
    }
    // Each flip leaves a state; mean rate 5 /s over 200 s.
    EXPECT_NEAR(static_cast<double>(flips) / 200.0, 5.0, 0.5);
}

TEST(Backaction, PeriodicAndBounded) {
    nz::BackactionModel m{1.0, 12.0, 0.0};
    EXPECT_NEAR(nz::backaction_gain(0.0, m), 1.0, 1e-15);
    EXPECT_NEAR(nz::backaction_gain(-6.0, m), 0.0, 1e-15);
    for (double e = -30.0; e < 30.0; e += 0.37) {
        const double g = nz::backaction_gain(e, m);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0);
        EXPECT_NEAR(g, nz::backaction_gain(e + 12.0, m), 1e-13) << e;
    }
    // Bit-exact when e + period is representable (here multiples of 1/64 mV).
    nz::BackactionModel shifted{0.8, 12.0, 1.5};
    for (int i = -2000; i <= 2000; i += 7) {
        const double e = i / 64.0;
        EXPECT_EQ(nz::backaction_gain(e, shifted), nz::backaction_gain(e + 12.0, shifted)) << e;
    }
}

TEST(NoiseStack, EffectiveScalesBackaction) {
    nz::NoiseStack stack;
    stack.base = nz::synthesize_white(1.0, 1.0, 1e-3, 1);
    stack.backaction = nz::synthesize_white(3.0, 1.0, 1e-3, 2);
    stack.model = {1.0, 12.0, 0.0};
    const auto quiet = stack.effective(-6.0);
    const auto loud = stack.effective(0.0);
    for (size_t j = 0; j < quiet.samples.size(); ++j) {
        EXPECT_NEAR(quiet.samples[j], stack.base.samples[j], 1e-12);
        EXPECT_NEAR(loud.samples[j], stack.base.samples[j] + stack.backaction->samples[j], 1e-12);
    }
}

TEST(Compose, RejectsMismatch) {
    const auto a = nz::synthesize_white(1.0, 1.0, 1e-3, 1);
    const auto b = nz::synthesize_white(1.0, 1.0, 2e-3, 1);
    const auto c = nz::synthesize_white(1.0, 2.0, 1e-3, 1);
    std::vector<nz::NoiseTrace> ab{a, b}, ac{a, c}, aa{a, a};
    EXPECT_THROW(nz::compose(ab), dl::CompositionError);
    EXPECT_THROW(nz::compose(ac), dl::CompositionError);
    const auto sum = nz::compose(aa);
    EXPECT_DOUBLE_EQ(sum.samples[10], 2.0 * a.samples[10]);
}

TEST(Trace, LookupAndDuration) {
    nz::NoiseTrace t;
    t.dt = 0.5;
    t.samples = {1.0, 2.0, 3.0};
    EXPECT_EQ(t.at(0.0), 1.0);
    EXPECT_EQ(t.at(0.49), 1.0);
    EXPECT_EQ(t.at(0.5), 2.0);
    EXPECT_EQ(t.at(1.49), 3.0);
    EXPECT_THROW(t.at(1.5), dl::DurationError);
    EXPECT_THROW(t.at(-0.1), dl::DurationError);
}

TEST(Transduction, ScalesByGradientTimesGamma) {
    nz::NoiseTrace pos;
    pos.dt = 1e-3;
    pos.samples = {1.0, -0.5};
    const auto f = nz::transduce(pos, nz::TransductionSpec{});
    EXPECT_NEAR(f.samples[0], 0.184 * 28.025e6, 1e-3);
    EXPECT_NEAR(f.samples[1], -0.5 * 0.184 * 28.025e6, 1e-3);
}

TEST(Transduction, Linear) {
    const auto x = nz::synthesize_white(2.0, 0.5, 1e-3, 4);
    const nz::TransductionSpec ts{0.2, 28.0};
    for (double a : {-3.0, 0.5, 7.25}) {
        const auto lhs = nz::transduce(nz::scaled(x, a), ts);
        const auto rhs = nz::transduce(x, ts);
        for (size_t j = 0; j < x.samples.size(); ++j) ASSERT_NEAR(lhs.samples[j], a * rhs.samples[j], 1e-9 * std::abs(lhs.samples[j]) + 1e-12);
    }
}

TEST(TraceIo, CsvAndJsonRoundTrip) {
    auto t = nz::synthesize_powerlaw(spec(1e4, 1.0), 0.256, 1e-3, 77);
    const auto dir = std::filesystem::temp_directory_path() / "driftlock_trace_io";
    std::filesystem::create_directories(dir);
    dl::write_text_file(dir / "t.csv", nz::trace_to_csv(t));
    dl::write_text_file(dir / "t.json", nz::trace_to_json(t));
    const auto c = nz::trace_from_csv(dir / "t.csv");
    const auto j = nz::trace_from_json(dir / "t.json");
    EXPECT_EQ(c.samples, t.samples);
    EXPECT_EQ(j.samples, t.samples);
    EXPECT_DOUBLE_EQ(c.dt, t.dt);
    EXPECT_EQ(j.seed, t.seed);
    std::filesystem::remove_all(dir);
}
