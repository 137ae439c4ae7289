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

#include "driftlock/spectra/gaussian_fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"

namespace driftlock::spectra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Parameters in time units of the curve span: x = [c, v, T/span, f*span, phi].
using Params = Eigen::Matrix<double, 5, 1>;

double model(const Params &x, double tau) {
    const double env = std::exp(-tau * tau / (x[2] * x[2]));
    return x[0] + x[1] * env * std::cos(kTwoPi * x[3] * tau + x[4]);
}

double cost_of(const Params &x, const std::vector<double> &tau, std::span<const double> p) {
    double s = 0.0;
    for (size_t i = 0; i < tau.size(); ++i) {
        const double r = model(x, tau[i]) - p[i];
        s += r * r;
    }
    return s;
}

struct LmOutcome {
    Params x;
    double cost;
    size_t iterations;
    bool converged;
};

LmOutcome levenberg_marquardt(Params x, const std::vector<double> &tau, std::span<const double> p) {
    const size_t n = tau.size();
    Eigen::MatrixXd J(n, 5);
    Eigen::VectorXd r(n);
    double lambda = 1e-3;
    double cost = cost_of(x, tau, p);
    size_t it = 0;
    for (; it < 500; ++it) {
        for (size_t i = 0; i < n; ++i) {
            const double t = tau[i];
            const double env = std::exp(-t * t / (x[2] * x[2]));
            const double arg = kTwoPi * x[3] * t + x[4];
            const double c = std::cos(arg);
            const double s = std::sin(arg);
            r[i] = x[0] + x[1] * env * c - p[i];
            J(i, 0) = 1.0;
            J(i, 1) = env * c;
            J(i, 2) = x[1] * env * c * 2.0 * t * t / (x[2] * x[2] * x[2]);
            J(i, 3) = -x[1] * env * s * kTwoPi * t;
            J(i, 4) = -x[1] * env * s;
        }
        const Eigen::Matrix<double, 5, 5> A = J.transpose() * J;
        const Params g = J.transpose() * r;
        bool improved = false;
        while (lambda < 1e12) {
            Eigen::Matrix<double, 5, 5> M = A;
            for (int k = 0; k < 5; ++k) M(k, k) += lambda * std::max(A(k, k), 1e-12);
            const Params step = M.ldlt().solve(-g);
            const Params trial = x + step;
            const double trial_cost = cost_of(trial, tau, p);
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double drop = cost - trial_cost;
                x = trial;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                if (drop <= 1e-15 * cost || step.norm() <= 1e-13 * (1.0 + x.norm())) {
                    return {x, cost, it + 1, true};
                }
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) {
            // No downhill step at any damping: a (local) minimum to machine precision.
            return {x, cost, it + 1, g.norm() <= 1e-8 * std::max(1.0, std::sqrt(cost)) * std::sqrt(double(n)) ||
                                         cost <= 1e-28 * double(n)};
        }
    }
    return {x, cost, it, false};
}

GaussianDecayFit to_physical(const Params &x, double span, double cost, size_t n, size_t iterations) {
    GaussianDecayFit fit;
    double v = x[1];
    double f = x[3];
    double phi = x[4];
    if (f < 0) {
        f = -f;
        phi = -phi;
    }
    if (v < 0) {
        v = -v;
        phi += std::numbers::pi;
    }
    phi = std::remainder(phi, kTwoPi);
    if (phi <= -std::numbers::pi) phi += kTwoPi;
    fit.offset = x[0];
    fit.visibility = v;
    fit.t2_star = std::abs(x[2]) * span;
    fit.frequency = f / span;
    fit.phase = phi;
    fit.rms_residual = std::sqrt(cost / static_cast<double>(n));
    fit.iterations = iterations;
    return fit;
}

}  // namespace

double GaussianDecayFit::evaluate(double t) const {
    return offset + visibility * std::exp(-t * t / (t2_star * t2_star)) * std::cos(kTwoPi * frequency * t + phase);
}

GaussianDecayFit fit_gaussian_decay(std::span<const double> t, std::span<const double> p) {
    if (t.size() != p.size()) throw ConfigError("fit_gaussian_decay: t and p differ in length");
    const size_t n = t.size();
    if (n < 8) throw ConfigError("fit_gaussian_decay: need >= 8 points");
    const double span = *std::max_element(t.begin(), t.end());
    if (!(span > 0)) throw ConfigError("fit_gaussian_decay: times must include a positive value");

    std::vector<double> tau(n);
    for (size_t i = 0; i < n; ++i) tau[i] = t[i] / span;
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(n);
    const auto [pmin, pmax] = std::minmax_element(p.begin(), p.end());
    if (*pmax - *pmin <= 1e-12 * std::max(1.0, std::abs(mean))) {
        GaussianDecayFit flat;
        flat.offset = mean;
        throw FitError("fit_gaussian_decay: flat curve, no oscillation to fit", flat);
    }

    // Frequency scan on the mean-removed curve, in cycles per span.
    double min_gap = std::numeric_limits<double>::infinity();
    std::vector<double> sorted(tau);
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < n; ++i) {
        if (sorted[i] > sorted[i - 1]) min_gap = std::min(min_gap, sorted[i] - sorted[i - 1]);
    }
    const double f_top = std::isfinite(min_gap) ? 0.5 / min_gap : 0.5 * static_cast<double>(n);
    double best_f = 1.0;
    double best_power = -1.0;
    for (double f = 0.5; f <= f_top; f += 0.02) {
        double re = 0.0, im = 0.0;
        for (size_t i = 0; i < n; ++i) {
            re += (p[i] - mean) * std::cos(kTwoPi * f * tau[i]);
            im += (p[i] - mean) * std::sin(kTwoPi * f * tau[i]);
        }
        const double power = re * re + im * im;
        if (power > best_power) {
            best_power = power;
            best_f = f;
        }
    }

    LmOutcome best{Params::Zero(), std::numeric_limits<double>::infinity(), 0, false};
    size_t total_iterations = 0;
    for (double T0 : std::array{0.5, 1.0, 2.0, 0.25, 4.0}) {
        // Linear least squares for the quadratures at the scanned frequency.
        Eigen::MatrixXd B(n, 3);
        Eigen::VectorXd y(n);
        for (size_t i = 0; i < n; ++i) {
            const double env = std::exp(-tau[i] * tau[i] / (T0 * T0));
            B(i, 0) = 1.0;
            B(i, 1) = env * std::cos(kTwoPi * best_f * tau[i]);
            B(i, 2) = env * std::sin(kTwoPi * best_f * tau[i]);
            y[i] = p[i];
        }
        const Eigen::Vector3d ab = B.colPivHouseholderQr().solve(y);
        Params x0;
        x0 << ab[0], std::hypot(ab[1], ab[2]), T0, best_f, -std::atan2(ab[2], ab[1]);
        const LmOutcome out = levenberg_marquardt(x0, tau, p);
        total_iterations += out.iterations;
        if (out.cost < best.cost || (out.converged && !best.converged && out.cost <= best.cost * (1 + 1e-9))) {
            best = out;
        }
    }

    GaussianDecayFit fit = to_physical(best.x, span, best.cost, n, total_iterations);
    if (!best.converged) {
        throw FitError("fit_gaussian_decay: no restart converged (rms residual " + format_double(fit.rms_residual) +
                           ")",
                       fit);
    }
    if (fit.visibility <= 1e-9 * std::max(1.0, std::abs(fit.offset))) {
        throw FitError("fit_gaussian_decay: fitted visibility is zero, no oscillation", fit);
    }
    return fit;
}

}  // namespace driftlock::spectra
