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

#include "driftlock/estimator/session.hpp"

#include <chrono>

#include "driftlock/errors.hpp"

namespace driftlock::estimator {

EstimatorSession::EstimatorSession(GridShape shape, LikelihoodParams likelihood, double prior_sigma)
    : shape_(shape), likelihood_(likelihood), prior_sigma_(prior_sigma) {
    shape_.validate();
    likelihood_.validate();
    if (!(prior_sigma_ > 0)) throw ConfigError("estimator: prior_sigma must be > 0");
    grid_ = init_prior(PriorSpec::uniform(), shape_).grid;
}

std::optional<std::string> EstimatorSession::begin_cycle(std::optional<double> prior_mean) {
    compute_seconds_ = 0.0;
    PriorResult prior = init_prior(prior_mean ? PriorSpec::gaussian(*prior_mean, prior_sigma_) : PriorSpec::uniform(),
                                   shape_);
    grid_ = std::move(prior.grid);
    return prior.warning;
}

void EstimatorSession::observe(const qubit::ShotRecord &shot) {
    const auto start = std::chrono::steady_clock::now();
    bayes_update_in_place(grid_, shot, likelihood_);
    compute_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace driftlock::estimator
