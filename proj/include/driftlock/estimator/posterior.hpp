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
#include <string>
#include <vector>

#include "driftlock/qubit/qubit_sim.hpp"

namespace driftlock::estimator {

// Candidate detunings: n_bins bins of equal width on [f_min, f_max], each
// represented by its center.
struct GridShape {
    double f_min = 0.0;       // Hz
    double f_max = 12.5e6;    // Hz
    size_t n_bins = 2500;

    void validate() const;
    double bin_width() const { return (f_max - f_min) / static_cast<double>(n_bins); }
    double center(size_t j) const { return f_min + (static_cast<double>(j) + 0.5) * bin_width(); }
};

struct PriorSpec {
    enum class Kind { uniform, gaussian };
    Kind kind = Kind::uniform;
    double mean = 0.0;      // Hz
    double sigma = 50e3;    // Hz

    static PriorSpec uniform() { return {}; }
    static PriorSpec gaussian(double mean, double sigma = 50e3) { return {Kind::gaussian, mean, sigma}; }
};

struct LikelihoodParams {
    double alpha = 0.0;
    double beta_vis = 1.0;
    double theta = 0.0;  // rad

    void validate() const;
};

struct PosteriorGrid {
    GridShape shape;
    std::vector<double> log_weights;  // per-bin log mass; normalized after every update

    std::vector<double> probabilities() const;
    double total_mass() const;
};

struct PriorResult {
    PosteriorGrid grid;
    std::optional<std::string> warning;  // set when a gaussian mean lies off the grid
};

PriorResult init_prior(const PriorSpec &spec, const GridShape &shape);

// Multiplies in one shot's likelihood and renormalizes. Throws
// DegeneratePosteriorError if no finite mass remains.
void bayes_update_in_place(PosteriorGrid &grid, const qubit::ShotRecord &shot, const LikelihoodParams &lk);
PosteriorGrid bayes_update(PosteriorGrid grid, const qubit::ShotRecord &shot, const LikelihoodParams &lk);

// Center of the heaviest bin; ties go to the lowest frequency.
double estimate(const PosteriorGrid &grid);

// Mass-weighted standard deviation of the bin centers.
double posterior_sigma(const PosteriorGrid &grid);

// `f_hz,probability`
std::string posterior_csv(const PosteriorGrid &grid);

}  // namespace driftlock::estimator
