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

#include <span>
#include <string>
#include <vector>

namespace driftlock::spectra {

// Sample variance of overlapping lag-T increments x[j + T/dt] - x[j].
// T must be a positive multiple of dt; throws StatisticsError below 30 increments.
double increment_variance(std::span<const double> series, double dt, double T);

struct DiffusionFit {
    double alpha = 0.0;
    double d_alpha = 0.0;              // series^2 / s^alpha
    std::vector<double> intervals;     // s
    std::vector<double> variances;     // series^2
};

// Least squares of log sigma^2(T) = log(2 D) + alpha log T. Needs >= 4
// intervals spanning at least a decade.
DiffusionFit fit_diffusion(std::span<const double> series, double dt, std::span<const double> intervals);

// n log-spaced multiples of dt from lo to hi (deduplicated after rounding).
std::vector<double> log_spaced_intervals(double dt, double lo, double hi, size_t n);

// `interval_s,increment_variance_hz2`
std::string diffusion_csv(const DiffusionFit &fit);

}  // namespace driftlock::spectra
