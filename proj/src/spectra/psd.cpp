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

#include "driftlock/spectra/psd.hpp"

#include <cmath>
#include <complex>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/fft.hpp"

namespace driftlock::spectra {

PsdEstimate estimate_psd(std::span<const double> series, double dt, PsdMethod method, size_t n_segments) {
    if (!(dt > 0)) throw ConfigError("estimate_psd: dt must be > 0");
    if (n_segments < 1) throw ConfigError("estimate_psd: n_segments must be >= 1");
    if (method == PsdMethod::periodogram && n_segments != 1) {
        throw ConfigError("estimate_psd: the periodogram uses exactly one segment");
    }
    if (series.size() < 2 * n_segments) {
        throw StatisticsError("estimate_psd: series of " + std::to_string(series.size()) +
                              " samples is too short for " + std::to_string(n_segments) + " segment(s)");
    }

    const size_t m = series.size() / n_segments;
    const size_t half = m / 2;
    PsdEstimate psd;
    psd.method = method;
    psd.n_segments = n_segments;
    psd.dt = dt;
    psd.freqs.resize(half + 1);
    psd.power.assign(half + 1, 0.0);
    const double seg_duration = static_cast<double>(m) * dt;
    for (size_t k = 0; k <= half; ++k) psd.freqs[k] = static_cast<double>(k) / seg_duration;

    // |X_k|^2 dt / m is the two-sided density; interior bins are doubled.
    const double scale = dt / static_cast<double>(m) / static_cast<double>(n_segments);
    std::vector<double> segment(m);
    for (size_t s = 0; s < n_segments; ++s) {
        double mean = 0.0;
        for (size_t j = 0; j < m; ++j) mean += series[s * m + j];
        mean /= static_cast<double>(m);
        for (size_t j = 0; j < m; ++j) segment[j] = series[s * m + j] - mean;
        const auto spectrum = fft::forward_real(segment);
        for (size_t k = 0; k <= half; ++k) {
            const bool edge = k == 0 || (m % 2 == 0 && k == half);
            psd.power[k] += (edge ? 1.0 : 2.0) * std::norm(spectrum[k]) * scale;
        }
    }
    return psd;
}

PowerLawFit fit_powerlaw(const PsdEstimate &psd, double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("fit_powerlaw: band must satisfy lo < hi");
    double sx = 0, sy = 0;
    size_t n = 0;
    std::vector<std::pair<double, double>> points;
    for (size_t k = 0; k < psd.freqs.size(); ++k) {
        const double f = psd.freqs[k];
        if (f < lo || f > hi || !(f > 0) || !(psd.power[k] > 0)) continue;
        const double x = std::log10(f);
        const double y = std::log10(psd.power[k]);
        points.emplace_back(x, y);
        sx += x;
        sy += y;
        ++n;
    }
    if (n < 5) {
        throw StatisticsError("fit_powerlaw: only " + std::to_string(n) + " positive bins in [" +
                              format_double(lo) + ", " + format_double(hi) + "] Hz, need >= 5");
    }
    const double dn = static_cast<double>(n);
    const double mx = sx / dn;
    const double my = sy / dn;
    double cxx = 0, cxy = 0;
    for (const auto &[x, y] : points) {
        cxx += (x - mx) * (x - mx);
        cxy += (x - mx) * (y - my);
    }
    const double slope = cxy / cxx;
    const double intercept = my - slope * mx;
    double ss = 0;
    for (const auto &[x, y] : points) {
        const double r = y - (intercept + slope * x);
        ss += r * r;
    }
    PowerLawFit fit;
    fit.exponent_beta = -slope;
    fit.amplitude_A = std::pow(10.0, intercept);
    fit.band_lo = lo;
    fit.band_hi = hi;
    fit.residual = std::sqrt(ss / dn);
    fit.n_bins = n;
    return fit;
}

double band_mean_power(const PsdEstimate &psd, double lo, double hi) {
    double sum = 0.0;
    size_t n = 0;
    for (size_t k = 0; k < psd.freqs.size(); ++k) {
        if (psd.freqs[k] >= lo && psd.freqs[k] <= hi && psd.freqs[k] > 0) {
            sum += psd.power[k];
            ++n;
        }
    }
    if (n == 0) throw StatisticsError("band_mean_power: no bins in band");
    return sum / static_cast<double>(n);
}

std::string psd_csv(const PsdEstimate &psd) {
    CsvWriter out({"f_hz", "psd_hz2_per_hz"});
    for (size_t k = 0; k < psd.freqs.size(); ++k) out.row({psd.freqs[k], psd.power[k]});
    return out.text();
}

std::string_view method_name(PsdMethod method) {
    return method == PsdMethod::periodogram ? "periodogram" : "averaged-segments";
}

}  // namespace driftlock::spectra
