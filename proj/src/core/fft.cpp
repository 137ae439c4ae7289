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

#include "driftlock/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace driftlock::fft {

namespace {

// The FFTW planner is not re-entrant.
std::mutex &planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::vector<std::complex<double>> forward_real(std::span<const double> x) {
    const size_t n = x.size();
    if (n == 0) return {};
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex *>(out.data()), FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fftw: could not create r2c plan");
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> inverse_real(std::span<const std::complex<double>> half_spectrum, size_t n) {
    if (n == 0) return {};
    if (half_spectrum.size() != n / 2 + 1) {
        throw std::invalid_argument("fft::inverse_real: spectrum must have n/2+1 bins");
    }
    // c2r overwrites its input.
    std::vector<std::complex<double>> in(half_spectrum.begin(), half_spectrum.end());
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex *>(in.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fftw: could not create c2r plan");
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace driftlock::fft
