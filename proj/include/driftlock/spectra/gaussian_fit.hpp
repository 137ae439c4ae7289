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
#include <stdexcept>
#include <string>

namespace driftlock::spectra {

// p(t) = offset + visibility * exp(-t^2 / t2_star^2) * cos(2 pi frequency t + phase)
struct GaussianDecayFit {
    double offset = 0.0;
    double visibility = 0.0;  // >= 0
    double t2_star = 0.0;     // s, > 0
    double frequency = 0.0;   // Hz, >= 0
    double phase = 0.0;       // rad, (-pi, pi]
    double rms_residual = 0.0;
    size_t iterations = 0;

    double evaluate(double t) const;
};

struct FitError : std::runtime_error {
    FitError(const std::string &what, GaussianDecayFit best_so_far)
        : std::runtime_error(what), best(best_so_far) {}
    GaussianDecayFit best;
};

// Levenberg-Marquardt from a frequency-scan start with restarts over the
// initial decay time. Needs >= 8 points; throws FitError for a flat curve
// or when no restart converges.
GaussianDecayFit fit_gaussian_decay(std::span<const double> t, std::span<const double> p);

}  // namespace driftlock::spectra
