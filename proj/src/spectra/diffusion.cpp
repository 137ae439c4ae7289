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

#include "driftlock/spectra/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"

namespace driftlock::spectra {

namespace {

size_t lag_of(double dt, double T) {
    if (!(dt > 0) || !(T > 0)) throw ConfigError("increment_variance: dt and T must be > 0");
    const double ratio = T / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1 || std::abs(ratio - rounded) > 1e-6 * rounded) {
        throw ConfigError("increment_variance: T = " + format_double(T) + " s is not a multiple of dt = " +
                          format_double(dt) + " s");
    }
    return static_cast<size_t>(rounded);
}

}  // namespace

double increment_variance(std::span<const double> series, double dt, double T) {
    const size_t lag = lag_of(dt, T);
    if (series.size() < lag + 30) {
        throw StatisticsError("increment_variance: T = " + format_double(T) + " s leaves " +
                              std::to_string(series.size() > lag ? series.size() - lag : 0) +
                              " increments, need >= 30");
    }
    const size_t n = series.size() - lag;
    double mean = 0.0;
    for (size_t j = 0; j < n; ++j) mean += series[j + lag] - series[j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (size_t j = 0; j < n; ++j) {
        const double d = series[j + lag] - series[j] - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(n - 1);
}

DiffusionFit fit_diffusion(std::span<const double> series, double dt, std::span<const double> intervals) {
    if (intervals.size() < 4) throw StatisticsError("fit_diffusion: need >= 4 intervals");
    const auto [lo, hi] = std::minmax_element(intervals.begin(), intervals.end());
    if (!(*lo > 0) || *hi < 10.0 * *lo * (1 - 1e-9)) {
        throw StatisticsError("fit_diffusion: intervals must span at least one decade");
    }
    DiffusionFit fit;
    fit.intervals.assign(intervals.begin(), intervals.end());
    std::vector<double> xs, ys;
    for (double T : intervals) {
        const double v = increment_variance(series, dt, T);
        fit.variances.push_back(v);
        if (v > 0) {
            xs.push_back(std::log(T));
            ys.push_back(std::log(v));
        }
    }
    if (xs.size() < 2) {
        // A constant series has no increments to fit.
        fit.alpha = 0.0;
        fit.d_alpha = 0.0;
        return fit;
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double cxx = 0, cxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        cxx += (xs[i] - mx) * (xs[i] - mx);
        cxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.alpha = cxy / cxx;
    fit.d_alpha = 0.5 * std::exp(my - fit.alpha * mx);
    return fit;
}

std::vector<double> log_spaced_intervals(double dt, double lo, double hi, size_t n) {
    if (!(dt > 0) || !(lo > 0) || !(hi > lo) || n < 2) {
        throw ConfigError("log_spaced_intervals: need dt > 0, 0 < lo < hi, n >= 2");
    }
    std::vector<double> out;
    size_t last = 0;
    for (size_t i = 0; i < n; ++i) {
        const double T = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
        const size_t lag = std::max<size_t>(1, static_cast<size_t>(std::llround(T / dt)));
        if (lag != last) {
            out.push_back(static_cast<double>(lag) * dt);
            last = lag;
        }
    }
    return out;
}

std::string diffusion_csv(const DiffusionFit &fit) {
    CsvWriter out({"interval_s", "increment_variance_hz2"});
    for (size_t i = 0; i < fit.intervals.size(); ++i) out.row({fit.intervals[i], fit.variances[i]});
    return out.text();
}

}  // namespace driftlock::spectra
