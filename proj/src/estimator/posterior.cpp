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

#include "driftlock/estimator/posterior.hpp"

#include <cmath>
#include <limits>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/simd/kernels.hpp"

namespace driftlock::estimator {

void GridShape::validate() const {
    if (!(f_min < f_max)) throw ConfigError("grid: f_min must be < f_max");
    if (n_bins < 2) throw ConfigError("grid: n_bins must be >= 2");
}

void LikelihoodParams::validate() const {
    if (!(beta_vis >= 0)) throw ConfigError("likelihood: beta_vis must be >= 0");
    if (!(std::abs(alpha) + beta_vis <= 1 + 1e-12)) {
        throw ConfigError("likelihood: |alpha| + beta_vis must be <= 1");
    }
}

std::vector<double> PosteriorGrid::probabilities() const {
    std::vector<double> p(log_weights.size());
    for (size_t j = 0; j < p.size(); ++j) p[j] = std::exp(log_weights[j]);
    return p;
}

double PosteriorGrid::total_mass() const {
    double sum = 0.0;
    for (double lw : log_weights) sum += std::exp(lw);
    return sum;
}

PriorResult init_prior(const PriorSpec &spec, const GridShape &shape) {
    shape.validate();
    PriorResult result;
    result.grid.shape = shape;
    result.grid.log_weights.assign(shape.n_bins, 0.0);
    if (spec.kind == PriorSpec::Kind::gaussian) {
        if (!(spec.sigma > 0)) throw ConfigError("prior: gaussian sigma must be > 0");
        if (spec.mean < shape.f_min || spec.mean > shape.f_max) {
            result.warning = "gaussian prior mean " + format_double(spec.mean) + " Hz lies outside the grid [" +
                             format_double(shape.f_min) + ", " + format_double(shape.f_max) + "] Hz";
        }
        for (size_t j = 0; j < shape.n_bins; ++j) {
            const double z = (shape.center(j) - spec.mean) / spec.sigma;
            result.grid.log_weights[j] = -0.5 * z * z;
        }
    }
    // Renormalizing in the log domain keeps far-off-grid means finite.
    if (std::isnan(simd::scalar_kernels().log_normalize(result.grid.log_weights))) {
        throw DegeneratePosteriorError("prior has no finite mass");
    }
    return result;
}

void bayes_update_in_place(PosteriorGrid &grid, const qubit::ShotRecord &shot, const LikelihoodParams &lk) {
    if (!(shot.evolution_time >= 0)) throw ConfigError("bayes_update: evolution_time must be >= 0");
    const simd::KernelTable &k = simd::active_kernels();
    const simd::RamseyTerm term{shot.evolution_time, static_cast<double>(shot.outcome), lk.alpha, lk.beta_vis,
                                lk.theta};
    k.accumulate_ramsey_loglik(grid.log_weights, grid.shape.center(0), grid.shape.bin_width(), term);
    if (std::isnan(k.log_normalize(grid.log_weights))) {
        throw DegeneratePosteriorError("posterior lost all finite mass after a shot at t = " +
                                       format_double(shot.evolution_time) + " s");
    }
}

PosteriorGrid bayes_update(PosteriorGrid grid, const qubit::ShotRecord &shot, const LikelihoodParams &lk) {
    bayes_update_in_place(grid, shot, lk);
    return grid;
}

double estimate(const PosteriorGrid &grid) {
    size_t best = 0;
    for (size_t j = 1; j < grid.log_weights.size(); ++j) {
        if (grid.log_weights[j] > grid.log_weights[best]) best = j;
    }
    return grid.shape.center(best);
}

double posterior_sigma(const PosteriorGrid &grid) {
    double mass = 0.0;
    double mean = 0.0;
    for (size_t j = 0; j < grid.log_weights.size(); ++j) {
        const double w = std::exp(grid.log_weights[j]);
        mass += w;
        mean += w * grid.shape.center(j);
    }
    mean /= mass;
    double var = 0.0;
    for (size_t j = 0; j < grid.log_weights.size(); ++j) {
        const double d = grid.shape.center(j) - mean;
        var += std::exp(grid.log_weights[j]) * d * d;
    }
    return std::sqrt(var / mass);
}

std::string posterior_csv(const PosteriorGrid &grid) {
    CsvWriter out({"f_hz", "probability"});
    for (size_t j = 0; j < grid.log_weights.size(); ++j) {
        out.row({grid.shape.center(j), std::exp(grid.log_weights[j])});
    }
    return out.text();
}

}  // namespace driftlock::estimator
