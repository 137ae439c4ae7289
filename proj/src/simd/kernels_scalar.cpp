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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "driftlock/simd/kernels.hpp"

namespace driftlock::simd {

namespace {

void accumulate_scalar(std::span<double> log_w, double f_first, double f_step, const RamseyTerm &term) {
    const double w = 2.0 * std::numbers::pi * term.t;
    for (size_t j = 0; j < log_w.size(); ++j) {
        const double f = f_first + static_cast<double>(j) * f_step;
        const double lik = 0.5 * (1.0 + term.outcome * (term.alpha + term.beta_vis * std::cos(w * f + term.theta)));
        log_w[j] += std::log(std::max(lik, kLikelihoodFloor));
    }
}

double normalize_scalar(std::span<double> log_w) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : log_w) {
        if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
        peak = std::max(peak, v);
    }
    if (!std::isfinite(peak)) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double v : log_w) sum += std::exp(v - peak);
    const double log_mass = peak + std::log(sum);
    for (double &v : log_w) v -= log_mass;
    return log_mass;
}

constexpr KernelTable kScalar{"scalar", &accumulate_scalar, &normalize_scalar};

}  // namespace

const KernelTable &scalar_kernels() { return kScalar; }

}  // namespace driftlock::simd
