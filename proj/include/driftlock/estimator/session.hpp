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

#include "driftlock/estimator/posterior.hpp"

namespace driftlock::estimator {

// One estimation cycle at a time: begin_cycle() resets the grid to a prior,
// observe() folds in shots, estimate()/sigma() read the current posterior.
class EstimatorSession {
public:
    EstimatorSession(GridShape shape, LikelihoodParams likelihood, double prior_sigma = 50e3);

    // Uniform prior when prior_mean is empty, else a gaussian of prior_sigma.
    // Returns the off-grid warning, if any.
    std::optional<std::string> begin_cycle(std::optional<double> prior_mean);
    void observe(const qubit::ShotRecord &shot);

    double estimate() const { return estimator::estimate(grid_); }
    double sigma() const { return posterior_sigma(grid_); }
    const PosteriorGrid &posterior() const { return grid_; }
    const GridShape &shape() const { return shape_; }

    // Wall-clock seconds spent in observe() since begin_cycle(); diagnostic only.
    double compute_seconds() const { return compute_seconds_; }

private:
    GridShape shape_;
    LikelihoodParams likelihood_;
    double prior_sigma_;
    PosteriorGrid grid_;
    double compute_seconds_ = 0.0;
};

}  // namespace driftlock::estimator
