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

#include "driftlock/markovianity/chi_squared.hpp"

#include <cmath>
#include <limits>

#include "driftlock/errors.hpp"

namespace driftlock::markovianity {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 10000;

double log_prefactor(double a, double x) { return -x + a * std::log(x) - std::lgamma(a); }

double series_p(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxTerms; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(log_prefactor(a, x));
}

double continued_fraction_q(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(log_prefactor(a, x)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0)) throw ConfigError("regularized_gamma_p: a must be > 0");
    if (x <= 0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return series_p(a, x);
    return 1.0 - continued_fraction_q(a, x);
}

double chi_squared_cdf(double x, double k) { return regularized_gamma_p(0.5 * k, 0.5 * x); }

double chi_squared_quantile(double p, double k) {
    if (!(k > 0)) throw ConfigError("chi_squared_quantile: k must be > 0");
    if (!(p > 0 && p < 1)) throw ConfigError("chi_squared_quantile: p must lie in (0, 1)");
    double lo = 0.0;
    double hi = std::max(1.0, k);
    while (chi_squared_cdf(hi, k) < p) {
        lo = hi;
        hi *= 2.0;
    }
    // Newton on the cdf, falling back to bisection whenever a step leaves the bracket.
    double x = 0.5 * (lo + hi);
    const double a = 0.5 * k;
    for (int i = 0; i < 200; ++i) {
        const double f = chi_squared_cdf(x, k) - p;
        if (f == 0.0) return x;
        if (f < 0) lo = x; else hi = x;
        const double log_pdf = (a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a) - std::log(2.0);
        const double pdf = std::exp(log_pdf);
        double next = x - f / pdf;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * x || hi - lo <= 1e-15 * hi) return next;
        x = next;
    }
    return x;
}

}  // namespace driftlock::markovianity
