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

#include <optional>
#include <string_view>

#include "driftlock/noise/noise_models.hpp"
#include "driftlock/spectra/psd.hpp"

namespace driftlock::spectra {

// sin(x)/x with sinc(0) = 1.
double sinc(double x);

// F_t(f) = t^2 sinc^2(pi f t), s^2.
double filter_function(double f, double t);

struct DecoherenceIntegral {
    double w = 1.0;            // exp(-2 pi^2 t^2 integral)
    double integral = 0.0;     // Hz^2, int S(f) sinc^2(pi f t) df over [f0, f_max]
    double quad_error = 0.0;   // Hz^2, summed Gauss-Kronrod error estimates
    double tail_bound = 0.0;   // Hz^2, bound on the neglected part above f_max
    size_t pieces = 0;
};

// Integrates S(f) = A f^-beta over [f0, f_max]; spec.f_low and spec.f_high
// are not applied. Below 1/t the band is split into log-spaced pieces, above
// it into sinc lobes [n/t, (n+1)/t]. f_max = 0 selects 50/t. Throws
// NumericalError when the relative error estimate exceeds 1e-6.
DecoherenceIntegral decoherence_integral(double t, const noise::PowerLawSpec &spec, double f0, double f_max = 0.0);

double decoherence_w(double t, const noise::PowerLawSpec &spec, double f0, double f_max = 0.0);

// Discrete version for a measured spectrum: bins with f0 <= f <= f_max.
double decoherence_w(double t, const PsdEstimate &psd, double f0, double f_max);

// exp(-(t^2/2) (2 pi)^2 sigma^2)
double quasi_static_w(double t, double sigma);

double sigma_from_t2(double t2_star);
double t2_from_sigma(double sigma);

enum class PredictionMode { quasi_static, full_integral };
std::string_view mode_name(PredictionMode mode);

struct DecoherencePrediction {
    // Empty for a zero spectrum: no decoherence, not a number.
    std::optional<double> t2_star;       // s
    std::optional<double> sigma_static;  // Hz
    double f0 = 0.0;
    double f1 = 0.0;
    PredictionMode mode = PredictionMode::quasi_static;

    bool decoheres() const { return t2_star.has_value(); }
};

// quasi_static: sigma^2 = A int_{f0}^{f1} f^-beta df in closed form.
// full_integral: solves W(t) = 1/e with the sinc^2 filter over the same band.
DecoherencePrediction predict_t2star(const noise::PowerLawSpec &spec, double f0, double f1,
                                     PredictionMode mode = PredictionMode::quasi_static);

}  // namespace driftlock::spectra
