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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace driftlock::noise {

// One-sided frequency-noise PSD S(f) = A * f^-beta on [f_low, f_high].
struct PowerLawSpec {
    double amplitude_A = 0.0;  // Hz^2/Hz at 1 Hz
    double exponent_beta = 1.0;
    double f_low = 1e-3;   // Hz
    double f_high = 1e6;   // Hz

    void validate() const;
    double density(double f) const;
};

// Symmetric two-state fluctuator switching between +amplitude and -amplitude.
struct TelegraphSpec {
    double amplitude = 0.0;       // Hz
    double switching_rate = 1.0;  // Hz, mean rate of leaving either state

    void validate() const;
};

// Sensor backaction strength versus the sensor plunger offset epsilon.
struct BackactionModel {
    double peak_gain = 1.0;
    double period_mV = 12.0;
    double phase_mV = 0.0;

    void validate() const;
};

// Position-to-frequency conversion through the micromagnet gradient.
struct TransductionSpec {
    double gradient = 0.184;             // mT/nm
    double gyromagnetic_ratio = 28.025;  // MHz/mT

    void validate() const;
    double hz_per_nm() const { return gradient * gyromagnetic_ratio * 1e6; }
};

// Uniformly sampled qubit-frequency offset delta_f(t) in Hz (or displacement
// in nm before transduction). Sample j covers [j*dt, (j+1)*dt).
struct NoiseTrace {
    double dt = 1.0;
    std::vector<double> samples;
    std::uint64_t seed = 0;
    std::string descriptor;

    void validate() const;
    double duration() const { return dt * static_cast<double>(samples.size()); }
    // Sample-and-hold lookup; throws DurationError past the end of the trace.
    double at(double t) const;
    size_t index_at(double t) const;
};

struct SynthesisOptions {
    // Std of a per-realization constant offset standing in for drift slower
    // than 1/duration (the DC bin of the shaped spectrum is always zero).
    double quasi_static_sigma = 0.0;  // Hz
};

// Closed-form integral of A f^-beta over [lo, hi]; continuous through beta = 1.
double band_power(const PowerLawSpec &spec, double lo, double hi);

struct SynthesisBand {
    double lo;
    double hi;
};

// [max(f_low, 1/duration), min(f_high, 1/(2 dt))]; throws ConfigError when empty.
SynthesisBand synthesis_band(const PowerLawSpec &spec, double duration, double dt);

// Spectral-shaping synthesis: independent complex Gaussian amplitudes per
// DFT bin whose variance is the target power inside that bin's frequency
// interval (clipped to the synthesis band), DC zeroed, inverse real FFT.
// The expected sample variance equals band_power over the synthesis band
// (plus quasi_static_sigma^2).
NoiseTrace synthesize_powerlaw(const PowerLawSpec &spec, double duration, double dt, std::uint64_t seed,
                               const SynthesisOptions &options = {});

NoiseTrace synthesize_telegraph(const TelegraphSpec &spec, double duration, double dt, std::uint64_t seed);

NoiseTrace synthesize_white(double sigma, double duration, double dt, std::uint64_t seed);

// Position trace in nm to frequency trace in Hz.
NoiseTrace transduce(const NoiseTrace &position_trace, const TransductionSpec &spec);

// Raised-cosine gain, periodic in epsilon with period_mV, maximal at phase_mV.
double backaction_gain(double epsilon_mV, const BackactionModel &model);

// Pointwise sum; throws CompositionError on mismatched dt or length.
NoiseTrace compose(std::span<const NoiseTrace> traces);

NoiseTrace scaled(const NoiseTrace &trace, double factor);

// Charge-noise background plus a sensor-backaction component whose
// amplitude follows backaction_gain(epsilon).
struct NoiseStack {
    NoiseTrace base;
    std::optional<NoiseTrace> backaction;
    BackactionModel model;

    // Frequency trace seen by the qubit while the sensor sits at epsilon.
    NoiseTrace effective(double epsilon_mV) const;
};

// Telegraph + white frequency noise used as the backaction component.
struct BackactionSource {
    TelegraphSpec telegraph;
    double white_sigma = 0.0;  // Hz
};

NoiseTrace synthesize_backaction(const BackactionSource &source, double duration, double dt,
                                 std::uint64_t seed);

}  // namespace driftlock::noise
