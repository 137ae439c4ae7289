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

#include "driftlock/noise/noise_models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/fft.hpp"
#include "driftlock/rng.hpp"

namespace driftlock::noise {

namespace {

size_t sample_count(double duration, double dt, double min_samples) {
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw ConfigError("dt must be positive and finite");
    }
    if (!(duration >= min_samples * dt * (1 - 1e-12))) {
        throw ConfigError("duration must be at least " + format_double(min_samples) + " * dt");
    }
    return std::max<size_t>(static_cast<size_t>(std::llround(duration / dt)),
                            static_cast<size_t>(min_samples));
}

}  // namespace

void PowerLawSpec::validate() const {
    if (!(amplitude_A >= 0) || !std::isfinite(amplitude_A)) {
        throw ConfigError("power law: amplitude_A must be >= 0");
    }
    if (!(exponent_beta >= 0 && exponent_beta <= 3)) {
        throw ConfigError("power law: exponent_beta must lie in [0, 3]");
    }
    if (!(f_low > 0)) {
        throw ConfigError("power law: f_low must be > 0");
    }
    if (!(f_low < f_high)) {
        throw ConfigError("power law: f_low must be < f_high");
    }
}

double PowerLawSpec::density(double f) const {
    if (f < f_low || f > f_high) return 0.0;
    return amplitude_A * std::pow(f, -exponent_beta);
}

void TelegraphSpec::validate() const {
    if (!(amplitude >= 0)) throw ConfigError("telegraph: amplitude must be >= 0");
    if (!(switching_rate > 0)) throw ConfigError("telegraph: switching_rate must be > 0");
}

void BackactionModel::validate() const {
    if (!(peak_gain >= 0)) throw ConfigError("backaction: peak_gain must be >= 0");
    if (!(period_mV > 0)) throw ConfigError("backaction: period_mV must be > 0");
}

void TransductionSpec::validate() const {
    if (!(gradient >= 0)) throw ConfigError("transduction: gradient must be >= 0");
    if (!(gyromagnetic_ratio > 0)) throw ConfigError("transduction: gyromagnetic_ratio must be > 0");
}

void NoiseTrace::validate() const {
    if (!(dt > 0)) throw ConfigError("noise trace: dt must be > 0");
    if (samples.empty()) throw ConfigError("noise trace: samples must be non-empty");
    for (double v : samples) {
        if (!std::isfinite(v)) throw ConfigError("noise trace: samples must be finite");
    }
}

size_t NoiseTrace::index_at(double t) const {
    if (t < 0) {
        throw DurationError("noise trace queried at negative time " + format_double(t) + " s");
    }
    // The small bias absorbs rounding of timestamps that sit exactly on a sample edge.
    auto idx = static_cast<size_t>(std::floor(t / dt + 1e-9));
    if (idx >= samples.size()) {
        throw DurationError("noise trace covers " + format_double(duration()) +
                            " s but the simulation requires at least " + format_double(t) + " s");
    }
    return idx;
}

double NoiseTrace::at(double t) const { return samples[index_at(t)]; }

double band_power(const PowerLawSpec &spec, double lo, double hi) {
    if (!(hi > lo) || spec.amplitude_A == 0.0) return 0.0;
    const double one_minus_beta = 1.0 - spec.exponent_beta;
    const double log_ratio = std::log(hi / lo);
    if (one_minus_beta == 0.0) {
        return spec.amplitude_A * log_ratio;
    }
    // a^(1-b) * (exp((1-b) ln(hi/lo)) - 1) / (1-b), stable as b -> 1.
    return spec.amplitude_A * std::pow(lo, one_minus_beta) * std::expm1(one_minus_beta * log_ratio) /
           one_minus_beta;
}

SynthesisBand synthesis_band(const PowerLawSpec &spec, double duration, double dt) {
    const double lo = std::max(spec.f_low, 1.0 / duration);
    const double hi = std::min(spec.f_high, 1.0 / (2.0 * dt));
    if (!(lo < hi)) {
        std::string which = spec.f_low >= 1.0 / (2.0 * dt)
                                ? "f_low (" + format_double(spec.f_low) + " Hz) >= Nyquist 1/(2 dt) (" +
                                      format_double(1.0 / (2.0 * dt)) + " Hz)"
                                : "f_high (" + format_double(spec.f_high) + " Hz) <= 1/duration (" +
                                      format_double(1.0 / duration) + " Hz)";
        throw ConfigError("empty synthesis band: " + which);
    }
    return {lo, hi};
}

NoiseTrace synthesize_powerlaw(const PowerLawSpec &spec, double duration, double dt, std::uint64_t seed,
                               const SynthesisOptions &options) {
    spec.validate();
    const size_t n = sample_count(duration, dt, 2);
    const double total = static_cast<double>(n) * dt;
    const SynthesisBand band = synthesis_band(spec, total, dt);
    if (!(options.quasi_static_sigma >= 0)) {
        throw ConfigError("quasi_static_sigma must be >= 0");
    }

    NoiseTrace trace;
    trace.dt = dt;
    trace.seed = seed;
    trace.descriptor = "powerlaw(A=" + format_double(spec.amplitude_A) +
                       ",beta=" + format_double(spec.exponent_beta) + ",band=[" +
                       format_double(band.lo) + "," + format_double(band.hi) + "] Hz)";

    const double df = 1.0 / total;
    const size_t half = n / 2;
    std::vector<std::complex<double>> spectrum(half + 1, {0.0, 0.0});
    Rng rng = stream_rng(seed, streams::kPowerLaw);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (size_t k = 1; k <= half; ++k) {
        const double fk = static_cast<double>(k) * df;
        const bool nyquist = (n % 2 == 0) && k == half;
        const double lo = std::max(band.lo, fk - 0.5 * df);
        const double hi = std::min(band.hi, nyquist ? fk : fk + 0.5 * df);
        const double power = band_power(spec, lo, hi);
        // Draw even for empty bins so a band change does not reshuffle the others.
        const double a = normal(rng);
        const double b = normal(rng);
        if (power <= 0) continue;
        const double s = std::sqrt(power);
        if (nyquist) {
            spectrum[k] = {s * a, 0.0};
        } else {
            spectrum[k] = {0.5 * s * a, -0.5 * s * b};
        }
    }
    trace.samples = fft::inverse_real(spectrum, n);

    if (options.quasi_static_sigma > 0) {
        Rng qs = stream_rng(seed, streams::kQuasiStatic);
        const double offset = options.quasi_static_sigma * normal(qs);
        for (double &v : trace.samples) v += offset;
        trace.descriptor += "+quasistatic(sigma=" + format_double(options.quasi_static_sigma) + " Hz)";
    }
    return trace;
}

NoiseTrace synthesize_telegraph(const TelegraphSpec &spec, double duration, double dt, std::uint64_t seed) {
    spec.validate();
    const size_t n = sample_count(duration, dt, 1);
    NoiseTrace trace;
    trace.dt = dt;
    trace.seed = seed;
    trace.descriptor = "telegraph(a=" + format_double(spec.amplitude) +
                       " Hz,rate=" + format_double(spec.switching_rate) + " Hz)";
    trace.samples.assign(n, 0.0);

    Rng rng = stream_rng(seed, streams::kTelegraph);
    std::exponential_distribution<double> dwell(spec.switching_rate);
    std::bernoulli_distribution coin(0.5);
    double state = coin(rng) ? 1.0 : -1.0;
    double next_switch = dwell(rng);
    for (size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * dt;
        while (next_switch <= t) {
            state = -state;
            next_switch += dwell(rng);
        }
        trace.samples[j] = spec.amplitude * state;
    }
    return trace;
}

NoiseTrace synthesize_white(double sigma, double duration, double dt, std::uint64_t seed) {
    if (!(sigma >= 0)) throw ConfigError("white noise: sigma must be >= 0");
    const size_t n = sample_count(duration, dt, 1);
    NoiseTrace trace;
    trace.dt = dt;
    trace.seed = seed;
    trace.descriptor = "white(sigma=" + format_double(sigma) + " Hz)";
    trace.samples.assign(n, 0.0);
    Rng rng = stream_rng(seed, streams::kWhite);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double &v : trace.samples) v = sigma * normal(rng);
    return trace;
}

NoiseTrace transduce(const NoiseTrace &position_trace, const TransductionSpec &spec) {
    spec.validate();
    NoiseTrace out = scaled(position_trace, spec.hz_per_nm());
    out.descriptor = "transduced[" + format_double(spec.gradient) + " mT/nm x " +
                     format_double(spec.gyromagnetic_ratio) + " MHz/mT](" + position_trace.descriptor + ")";
    return out;
}

double backaction_gain(double epsilon_mV, const BackactionModel &model) {
    model.validate();
    // fmod is exact, so gain(e) and gain(e + period) reach the same reduced
    // offset whenever e + period is itself representable.
    double offset = std::fmod(epsilon_mV - model.phase_mV, model.period_mV);
    if (offset < 0) offset += model.period_mV;
    return model.peak_gain * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (offset / model.period_mV)));
}

NoiseTrace compose(std::span<const NoiseTrace> traces) {
    if (traces.empty()) {
        throw CompositionError("compose: no traces given");
    }
    NoiseTrace out = traces.front();
    for (size_t i = 1; i < traces.size(); ++i) {
        const NoiseTrace &t = traces[i];
        if (t.dt != out.dt) {
            throw CompositionError("compose: dt mismatch (" + format_double(out.dt) + " s vs " +
                                   format_double(t.dt) + " s)");
        }
        if (t.samples.size() != out.samples.size()) {
            throw CompositionError("compose: length mismatch (" + std::to_string(out.samples.size()) +
                                   " vs " + std::to_string(t.samples.size()) + " samples)");
        }
        for (size_t j = 0; j < out.samples.size(); ++j) out.samples[j] += t.samples[j];
        out.descriptor += " + " + t.descriptor;
    }
    return out;
}

NoiseTrace scaled(const NoiseTrace &trace, double factor) {
    NoiseTrace out = trace;
    for (double &v : out.samples) v *= factor;
    return out;
}

NoiseTrace NoiseStack::effective(double epsilon_mV) const {
    if (!backaction) return base;
    const double gain = backaction_gain(epsilon_mV, model);
    NoiseTrace component = scaled(*backaction, gain);
    component.descriptor = format_double(gain) + "*(" + backaction->descriptor + ")";
    const NoiseTrace parts[] = {base, component};
    return compose(parts);
}

NoiseTrace synthesize_backaction(const BackactionSource &source, double duration, double dt,
                                 std::uint64_t seed) {
    const std::uint64_t sub = mix64(seed ^ streams::kBackaction);
    NoiseTrace telegraph = synthesize_telegraph(source.telegraph, duration, dt, sub);
    NoiseTrace white = synthesize_white(source.white_sigma, duration, dt, sub);
    const NoiseTrace parts[] = {telegraph, white};
    NoiseTrace out = compose(parts);
    out.seed = seed;
    out.descriptor = "backaction(" + out.descriptor + ")";
    return out;
}

}  // namespace driftlock::noise
