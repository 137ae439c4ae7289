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
#include <numbers>
#include <random>
#include <vector>

#include "driftlock/errors.hpp"
#include "driftlock/fft.hpp"
#include "driftlock/noise/noise_models.hpp"
#include "driftlock/rng.hpp"
#include "driftlock/spectra/decoherence.hpp"
#include "driftlock/spectra/diffusion.hpp"
#include "driftlock/spectra/gaussian_fit.hpp"
#include "driftlock/spectra/psd.hpp"

namespace dl = driftlock;
namespace sp = driftlock::spectra;

namespace {

constexpr double kPi = std::numbers::pi;

dl::noise::PowerLawSpec spec(double A, double beta) { return {A, beta, 1.0 / 300.0, 1e5}; }

}  // namespace

// ---- FFT

TEST(Fft, MatchesDirectDft) {
    std::vector<double> x{1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -1.0};
    const auto X = dl::fft::forward_real(x);
    ASSERT_EQ(X.size(), x.size() / 2 + 1);
    for (size_t k = 0; k < X.size(); ++k) {
        std::complex<double> s = 0.0;
        for (size_t j = 0; j < x.size(); ++j) s += x[j] * std::polar(1.0, -2 * kPi * double(j * k) / double(x.size()));
        EXPECT_NEAR(std::abs(X[k] - s), 0.0, 1e-12);
    }
    const auto back = dl::fft::inverse_real(X, x.size());
    for (size_t j = 0; j < x.size(); ++j) EXPECT_NEAR(back[j] / double(x.size()), x[j], 1e-12);
}

// ---- decoherence

TEST(Decoherence, SincAndFilter) {
    EXPECT_EQ(sp::sinc(0.0), 1.0);
    EXPECT_NEAR(sp::sinc(kPi), 0.0, 1e-16);
    EXPECT_NEAR(sp::sinc(1e-9), 1.0, 1e-15);
    EXPECT_NEAR(sp::filter_function(0.0, 2e-6), 4e-12, 1e-27);
    EXPECT_NEAR(sp::filter_function(1.0 / 2e-6, 2e-6), 0.0, 1e-27);
}

TEST(Decoherence, SigmaT2RoundTrip) {
    EXPECT_NEAR(sp::sigma_from_t2(3.21e-6), 70118.09, 0.01);
    for (double t = 1e-8; t < 1e-2; t *= 3.1) EXPECT_NEAR(sp::t2_from_sigma(sp::sigma_from_t2(t)) / t, 1.0, 1e-12);
    EXPECT_NEAR(sp::quasi_static_w(sp::t2_from_sigma(1e5), 1e5), std::exp(-1.0), 1e-14);
}

TEST(Decoherence, QuasiStaticMatchesClosedForm) {
    for (double beta : {0.0, 0.5, 1.0, 1.34, 2.0}) {
        const auto s = spec(2.96e9, beta);
        const auto p = sp::predict_t2star(s, s.f_low, s.f_high);
        const double var = dl::noise::band_power(s, s.f_low, s.f_high);
        ASSERT_TRUE(p.decoheres());
        EXPECT_NEAR(*p.sigma_static / std::sqrt(var), 1.0, 1e-12) << beta;
        EXPECT_NEAR(*p.t2_star, sp::t2_from_sigma(std::sqrt(var)), 1e-18) << beta;
    }
}

TEST(Decoherence, KnownSpectra) {
    auto p0 = sp::predict_t2star(spec(2.96e9, 1.34), 1.0 / 300.0, 1e5);
    EXPECT_NEAR(*p0.sigma_static, 245.69e3, 0.01e3);
    auto p6 = sp::predict_t2star(spec(1.75e9, 1.17), 1.0 / 300.0, 1e5);
    EXPECT_NEAR(*p6.t2_star, 1.404e-6, 0.001e-6);
}

TEST(Decoherence, ZeroSpectrumDoesNotDecohere) {
    const auto p = sp::predict_t2star(spec(0.0, 1.0), 1e-3, 1e5);
    EXPECT_FALSE(p.decoheres());
    const auto f = sp::predict_t2star(spec(0.0, 1.0), 1e-3, 1e5, sp::PredictionMode::full_integral);
    EXPECT_FALSE(f.decoheres());
}

TEST(Decoherence, FullIntegralNeverBelowQuasiStatic) {
    // sinc^2 <= 1 so the filtered integral is bounded by the band power.
    for (double beta : {0.8, 1.17, 1.34, 1.8}) {
        const auto s = spec(1e9, beta);
        const double sigma = std::sqrt(dl::noise::band_power(s, s.f_low, s.f_high));
        for (double t = 1e-8; t < 1e-5; t *= 1.7) {
            EXPECT_GE(sp::decoherence_w(t, s, s.f_low, s.f_high), sp::quasi_static_w(t, sigma) * (1 - 1e-12));
        }
        const auto full = sp::predict_t2star(s, s.f_low, s.f_high, sp::PredictionMode::full_integral);
        const auto qs = sp::predict_t2star(s, s.f_low, s.f_high);
        EXPECT_GE(*full.t2_star, *qs.t2_star * (1 - 1e-9));
    }
}

TEST(Decoherence, WNonIncreasingAndInUnitInterval) {
    for (double beta : {0.0, 1.0, 1.34, 2.5}) {
        const auto s = spec(1e4, beta);
        double prev = 1.0;
        for (double t = 1e-9; t < 2e-5; t *= 1.3) {
            const double w = sp::decoherence_w(t, s, s.f_low, s.f_high);
            ASSERT_GT(w, 0.0);
            ASSERT_LE(w, 1.0);
            ASSERT_LE(w, prev * (1 + 1e-12)) << beta << " " << t;
            prev = w;
        }
    }
}

TEST(Decoherence, PredictionIdentityBothModes) {
    for (auto mode : {sp::PredictionMode::quasi_static, sp::PredictionMode::full_integral}) {
        const auto p = sp::predict_t2star(spec(1.75e9, 1.17), 1.0 / 300.0, 1e5, mode);
        EXPECT_NEAR(sp::t2_from_sigma(*p.sigma_static) / *p.t2_star, 1.0, 1e-9) << sp::mode_name(mode);
    }
}

TEST(Decoherence, WhiteNoiseIntegralHasClosedForm) {
    // int_0^{50/t} sinc^2(pi f t) df = Si(100 pi) / (pi t); Si from its
    // asymptotic series, sin(100 pi) = 0.
    const double t = 1e-6, A = 1e3;
    const double x = 100.0 * kPi;
    const double si = kPi / 2 - (1.0 - 2.0 / (x * x) + 24.0 / std::pow(x, 4)) / x;
    const dl::noise::PowerLawSpec white{A, 0.0, 1e-9, 1e12};
    const auto r = sp::decoherence_integral(t, white, 1e-9);
    EXPECT_NEAR(r.integral, A * si / (kPi * t), 1e-7 * A / t);
    EXPECT_GT(r.tail_bound, 0.0);
}

TEST(Decoherence, DiscretePsdAgreesWithContinuous) {
    // Flat spectrum sampled every 10 Hz; sinc^2 varies on the 1/t = 500 kHz scale.
    sp::PsdEstimate psd;
    const double df = 10.0;
    for (int k = 0; k <= 100000; ++k) {
        psd.freqs.push_back(k * df);
        psd.power.push_back(1e4);
    }
    const double t = 2e-6;
    const double w_disc = sp::decoherence_w(t, psd, df, 1e6);
    const double w_cont = sp::decoherence_w(t, {1e4, 0.0, df, 1e6}, df, 1e6);
    EXPECT_LT(w_cont, 0.9);
    EXPECT_NEAR(w_disc, w_cont, 1e-4);
}

// ---- PSD

TEST(Psd, ParsevalHolds) {
    dl::Rng rng(3);
    std::normal_distribution<double> g(0.0, 2.0);
    std::vector<double> x(4096);
    for (double &v : x) v = g(rng) + 5.0;
    for (auto method : {sp::PsdMethod::periodogram, sp::PsdMethod::averaged_segments}) {
        const size_t segs = method == sp::PsdMethod::periodogram ? 1 : 8;
        const auto psd = sp::estimate_psd(x, 1e-3, method, segs);
        double area = 0.0;
        for (double p : psd.power) area += p * psd.df();
        // mean of per-segment (population) variances
        double expected = 0.0;
        const size_t m = x.size() / segs;
        for (size_t s = 0; s < segs; ++s) {
            double mu = 0.0, v = 0.0;
            for (size_t j = 0; j < m; ++j) mu += x[s * m + j];
            mu /= double(m);
            for (size_t j = 0; j < m; ++j) v += (x[s * m + j] - mu) * (x[s * m + j] - mu);
            expected += v / double(m);
        }
        expected /= double(segs);
        EXPECT_NEAR(area, expected, 1e-9 * expected) << sp::method_name(method);
        EXPECT_NEAR(psd.df(), 1.0 / (double(m) * 1e-3), 1e-9);
    }
}

TEST(Psd, WhiteNoiseLevel) {
    dl::Rng rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(1 << 16);
    for (double &v : x) v = g(rng);
    const double dt = 1e-3;
    const auto psd = sp::estimate_psd(x, dt, sp::PsdMethod::averaged_segments, 16);
    // one-sided level 2 sigma^2 dt
    EXPECT_NEAR(sp::band_mean_power(psd, 10.0, 400.0), 2.0 * dt, 0.05 * 2.0 * dt);
}

TEST(Psd, FitRecoversExactPowerLaw) {
    sp::PsdEstimate psd;
    for (int k = 0; k < 500; ++k) {
        psd.freqs.push_back(k * 0.1);
        psd.power.push_back(k == 0 ? 0.0 : 42.0 * std::pow(k * 0.1, -1.3));
    }
    const auto fit = sp::fit_powerlaw(psd, 0.5, 40.0);
    EXPECT_NEAR(fit.exponent_beta, 1.3, 1e-10);
    EXPECT_NEAR(fit.amplitude_A, 42.0, 1e-8);
    EXPECT_NEAR(fit.residual, 0.0, 1e-10);
    EXPECT_THROW(sp::fit_powerlaw(psd, 0.1, 0.3), dl::StatisticsError);
}

TEST(Psd, CsvHeader) {
    sp::PsdEstimate psd;
    psd.freqs = {0.0, 1.0};
    psd.power = {0.0, 2.0};
    const auto csv = sp::psd_csv(psd);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "f_hz,psd_hz2_per_hz");
}

// ---- diffusion

TEST(Diffusion, IncrementVarianceByHand) {
    std::vector<double> ramp(100), zigzag(101);
    for (size_t i = 0; i < ramp.size(); ++i) ramp[i] = 2.0 * double(i);
    for (size_t i = 0; i < zigzag.size(); ++i) zigzag[i] = double(i % 2);
    EXPECT_NEAR(sp::increment_variance(ramp, 0.5, 1.5), 0.0, 1e-12);
    // lag-1 increments alternate +1, -1: 100 of them, mean 0, sample variance 100/99
    EXPECT_NEAR(sp::increment_variance(zigzag, 1.0, 1.0), 100.0 / 99.0, 1e-12);
    EXPECT_NEAR(sp::increment_variance(zigzag, 1.0, 2.0), 0.0, 1e-12);
    std::vector<double> short_series(20, 1.0);
    EXPECT_THROW(sp::increment_variance(short_series, 1.0, 1.0), dl::StatisticsError);
    EXPECT_THROW(sp::increment_variance(ramp, 0.5, 0.7), dl::ConfigError);
}

TEST(Diffusion, RandomWalkAndIid) {
    dl::Rng rng(8);
    std::normal_distribution<double> g(0.0, 3.0);
    std::vector<double> walk(20000), iid(20000);
    double s = 0.0;
    for (size_t i = 0; i < walk.size(); ++i) {
        s += g(rng);
        walk[i] = s;
        iid[i] = g(rng);
    }
    const double dt = 24e-3;
    const auto iv = sp::log_spaced_intervals(dt, dt, 200 * dt, 10);
    const auto fw = sp::fit_diffusion(walk, dt, iv);
    EXPECT_NEAR(fw.alpha, 1.0, 0.1);
    // sigma^2(T) = 2 D T, step variance 9 per dt
    EXPECT_NEAR(fw.d_alpha, 9.0 / (2 * dt), 0.25 * 9.0 / (2 * dt));
    EXPECT_LT(sp::fit_diffusion(iid, dt, iv).alpha, 0.15);
}

TEST(Diffusion, IntervalsAreDistinctMultiples) {
    const double dt = 24e-3;
    const auto iv = sp::log_spaced_intervals(dt, dt, 100 * dt, 30);
    for (size_t i = 0; i < iv.size(); ++i) {
        const double m = iv[i] / dt;
        EXPECT_NEAR(m, std::round(m), 1e-9);
        if (i) EXPECT_GT(iv[i], iv[i - 1]);
    }
    EXPECT_NEAR(iv.front(), dt, 1e-15);
    EXPECT_NEAR(iv.back(), 100 * dt, 1e-12);
}

TEST(Diffusion, PowerLawNoiseIsSubDiffusive) {
    const auto tr = dl::noise::synthesize_powerlaw(spec(2.96e9, 1.34), 600.0, 24e-3, 31);
    const auto fit = sp::fit_diffusion(tr.samples, 24e-3, sp::log_spaced_intervals(24e-3, 24e-3, 20.0, 12));
    EXPECT_GT(fit.alpha, 0.0);
    EXPECT_LT(fit.alpha, 1.0);
}

// ---- gaussian decay fit

TEST(GaussianFit, RecoversNoiselessParameters) {
    std::vector<double> t, p;
    for (int k = 1; k <= 100; ++k) {
        t.push_back(k * 40e-9);
        p.push_back(0.5 + 0.45 * std::exp(-std::pow(t.back() / 1.2e-6, 2)) * std::cos(2 * kPi * 2e6 * t.back() + 0.3));
    }
    const auto fit = sp::fit_gaussian_decay(t, p);
    EXPECT_NEAR(fit.t2_star, 1.2e-6, 1e-9);
    EXPECT_NEAR(fit.frequency, 2e6, 1e2);
    EXPECT_NEAR(fit.visibility, 0.45, 1e-4);
    EXPECT_NEAR(fit.offset, 0.5, 1e-4);
    EXPECT_NEAR(fit.phase, 0.3, 1e-3);
    EXPECT_NEAR(fit.evaluate(t[10]), p[10], 1e-6);
}

TEST(GaussianFit, NoisyDataWithinTolerance) {
    dl::Rng rng(12);
    std::normal_distribution<double> g(0.0, 0.02);
    std::vector<double> t, p;
    for (int k = 1; k <= 100; ++k) {
        t.push_back(k * 40e-9);
        p.push_back(0.5 + 0.5 * std::exp(-std::pow(t.back() / 0.9e-6, 2)) * std::cos(2 * kPi * 2e6 * t.back()) + g(rng));
    }
    const auto fit = sp::fit_gaussian_decay(t, p);
    EXPECT_NEAR(fit.t2_star, 0.9e-6, 0.05e-6);
}

TEST(GaussianFit, FlatCurveRejected) {
    std::vector<double> t, p;
    for (int k = 1; k <= 20; ++k) {
        t.push_back(k * 40e-9);
        p.push_back(0.5);
    }
    EXPECT_THROW(sp::fit_gaussian_decay(t, p), sp::FitError);
}
