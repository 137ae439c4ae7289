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

#include "driftlock/spectra/decoherence.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"

namespace driftlock::spectra {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRelTolerance = 1e-6;
constexpr size_t kMaxLobes = 4096;
constexpr double kPiecesPerDecade = 2.0;

}  // namespace

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double filter_function(double f, double t) {
    const double s = sinc(kPi * f * t);
    return t * t * s * s;
}

DecoherenceIntegral decoherence_integral(double t, const noise::PowerLawSpec &spec, double f0, double f_max) {
    if (!(t > 0)) throw ConfigError("decoherence_w: t must be > 0");
    if (f_max == 0.0) f_max = 50.0 / t;
    if (!(f0 > 0 && f0 < f_max)) throw ConfigError("decoherence_w: need 0 < f0 < f_max");
    if (!(spec.amplitude_A >= 0)) throw ConfigError("decoherence_w: amplitude must be >= 0");

    DecoherenceIntegral out;
    if (spec.amplitude_A == 0.0) return out;

    const double A = spec.amplitude_A;
    const double beta = spec.exponent_beta;
    const auto integrand = [&](double f) {
        const double s = sinc(kPi * f * t);
        return A * std::pow(f, -beta) * s * s;
    };
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto piece = [&](double a, double b) {
        double err = 0.0;
        out.integral += Quad::integrate(integrand, a, b, 15, 1e-12, &err);
        out.quad_error += err;
        ++out.pieces;
    };

    // Smooth power-law region below the first sinc zero.
    const double knee = std::min(1.0 / t, f_max);
    if (f0 < knee) {
        const auto n = static_cast<size_t>(std::max(1.0, std::ceil(kPiecesPerDecade * std::log10(knee / f0))));
        double a = f0;
        for (size_t i = 1; i <= n; ++i) {
            const double b = i == n ? knee : f0 * std::pow(knee / f0, static_cast<double>(i) / static_cast<double>(n));
            piece(a, b);
            a = b;
        }
    }
    // One piece per lobe between consecutive zeros n/t.
    double upper = f_max;
    if (f_max > 1.0 / t) {
        const double lobe_cap = static_cast<double>(kMaxLobes + 1) / t;
        upper = std::min(f_max, lobe_cap);
        double a = std::max(f0, 1.0 / t);
        for (auto n = static_cast<std::uint64_t>(std::floor(a * t)) + 1;; ++n) {
            const double b = std::min(static_cast<double>(n) / t, upper);
            if (b > a) piece(a, b);
            a = b;
            if (a >= upper) break;
        }
    }
    out.tail_bound = A * std::pow(upper, -beta - 1.0) / ((beta + 1.0) * kPi * kPi * t * t);
    if (upper < f_max) {
        // Lobes beyond the cap are dropped; their bound joins the error budget.
        out.quad_error += out.tail_bound;
    }
    if (!(out.quad_error <= kRelTolerance * out.integral)) {
        throw NumericalError("decoherence_w: quadrature error estimate " + format_double(out.quad_error) +
                             " Hz^2 exceeds 1e-6 of the integral " + format_double(out.integral) + " Hz^2 at t = " +
                             format_double(t) + " s over " + std::to_string(out.pieces) + " pieces");
    }
    out.w = std::exp(-2.0 * kPi * kPi * t * t * out.integral);
    return out;
}

double decoherence_w(double t, const noise::PowerLawSpec &spec, double f0, double f_max) {
    return decoherence_integral(t, spec, f0, f_max).w;
}

double decoherence_w(double t, const PsdEstimate &psd, double f0, double f_max) {
    if (!(t > 0)) throw ConfigError("decoherence_w: t must be > 0");
    if (!(f0 < f_max)) throw ConfigError("decoherence_w: need f0 < f_max");
    const double df = psd.df();
    double integral = 0.0;
    for (size_t k = 0; k < psd.freqs.size(); ++k) {
        const double f = psd.freqs[k];
        if (f <= 0 || f < f0 || f > f_max) continue;
        const double s = sinc(kPi * f * t);
        integral += psd.power[k] * s * s * df;
    }
    return std::exp(-2.0 * kPi * kPi * t * t * integral);
}

double quasi_static_w(double t, double sigma) { return std::exp(-2.0 * kPi * kPi * t * t * sigma * sigma); }

double sigma_from_t2(double t2_star) {
    if (!(t2_star > 0)) throw ConfigError("sigma_from_t2: t2_star must be > 0");
    return 1.0 / (std::numbers::sqrt2 * kPi * t2_star);
}

double t2_from_sigma(double sigma) {
    if (!(sigma > 0)) throw ConfigError("t2_from_sigma: sigma must be > 0");
    return 1.0 / (std::numbers::sqrt2 * kPi * sigma);
}

std::string_view mode_name(PredictionMode mode) {
    return mode == PredictionMode::quasi_static ? "quasi-static" : "full-integral";
}

DecoherencePrediction predict_t2star(const noise::PowerLawSpec &spec, double f0, double f1, PredictionMode mode) {
    if (!(f0 > 0 && f0 < f1)) throw ConfigError("predict_t2star: need 0 < f0 < f1");
    if (!(spec.amplitude_A >= 0)) throw ConfigError("predict_t2star: amplitude must be >= 0");
    if (!(spec.exponent_beta >= 0 && spec.exponent_beta <= 3)) {
        throw ConfigError("predict_t2star: exponent_beta must lie in [0, 3]");
    }
    DecoherencePrediction p;
    p.f0 = f0;
    p.f1 = f1;
    p.mode = mode;
    if (spec.amplitude_A == 0.0) return p;

    const double variance = noise::band_power(spec, f0, f1);
    const double t_qs = t2_from_sigma(std::sqrt(variance));
    if (mode == PredictionMode::quasi_static) {
        p.t2_star = t_qs;
    } else {
        // t^2 * integral grows with t; the sinc^2 filter only removes power,
        // so the root lies at or above the quasi-static value.
        const auto g = [&](double t) {
            return 2.0 * kPi * kPi * t * t * decoherence_integral(t, spec, f0, f1).integral - 1.0;
        };
        double lo = t_qs;
        double hi = t_qs * 1.5;
        for (int i = 0; g(hi) < 0; ++i) {
            if (i > 60) throw NumericalError("predict_t2star: could not bracket W(t) = 1/e");
            lo = hi;
            hi *= 2.0;
        }
        if (g(lo) >= 0) {
            p.t2_star = lo;
        } else {
            std::uintmax_t iters = 200;
            const auto [a, b] = boost::math::tools::toms748_solve(
                g, lo, hi, boost::math::tools::eps_tolerance<double>(48), iters);
            if (iters >= 200) throw NumericalError("predict_t2star: root finding did not converge");
            p.t2_star = 0.5 * (a + b);
        }
    }
    p.sigma_static = sigma_from_t2(*p.t2_star);
    return p;
}

}  // namespace driftlock::spectra
