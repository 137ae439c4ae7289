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

#include <stdexcept>
#include <string>

namespace driftlock {

// Invalid parameters or configuration (missing units, out-of-range values, empty bands).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A noise trace does not cover the simulated time span.
struct DurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched dt or length when composing traces.
struct CompositionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Too few samples/increments/bins for the requested statistic.
struct StatisticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature or root finding did not reach the requested accuracy.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Posterior collapsed to no finite mass; the caller should reset the session.
struct DegeneratePosteriorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace driftlock
