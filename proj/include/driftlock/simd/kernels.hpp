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

#include <cstddef>
#include <span>
#include <string_view>

namespace driftlock::simd {

// Likelihood factors are clamped to this floor before the log is taken.
inline constexpr double kLikelihoodFloor = 1e-12;

// One Ramsey shot's likelihood 0.5 * (1 + r * (alpha + beta * cos(2 pi f t + theta))).
struct RamseyTerm {
    double t = 0.0;       // s
    double outcome = 1.0; // +1 or -1
    double alpha = 0.0;
    double beta_vis = 1.0;
    double theta = 0.0;   // rad
};

struct KernelTable {
    std::string_view name;
    // log_w[j] += log(max(L(f_first + j * f_step), floor))
    void (*accumulate_ramsey_loglik)(std::span<double> log_w, double f_first, double f_step,
                                     const RamseyTerm &term);
    // Shifts log_w so that sum(exp(log_w)) == 1 and returns the log of the
    // mass before the shift. Returns NaN (leaving log_w untouched) when the
    // mass is zero, infinite or NaN.
    double (*log_normalize)(std::span<double> log_w);
};

const KernelTable &scalar_kernels();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable *avx2_kernels();

// Chosen once per process: AVX2 when available unless DRIFTLOCK_SIMD=scalar.
const KernelTable &active_kernels();

}  // namespace driftlock::simd
