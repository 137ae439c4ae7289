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
#include <string>
#include <vector>

namespace driftlock::spectra {

enum class PsdMethod { periodogram, averaged_segments };

// One-sided PSD in units of series^2 / Hz.
struct PsdEstimate {
    std::vector<double> freqs;  // Hz, k / (segment_length * dt), k = 0..m/2
    std::vector<double> power;
    PsdMethod method = PsdMethod::periodogram;
    size_t n_segments = 1;
    double dt = 1.0;  // s

    double df() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

// Periodogram (n_segments must be 1) or the average of periodograms over
// n_segments non-overlapping, rectangular-windowed segments. Each segment's
// mean is removed. Sum(power) * df equals the mean of the segment variances.
PsdEstimate estimate_psd(std::span<const double> series, double dt, PsdMethod method = PsdMethod::periodogram,
                         size_t n_segments = 1);

struct PowerLawFit {
    double amplitude_A = 0.0;    // series^2/Hz at 1 Hz
    double exponent_beta = 0.0;
    double band_lo = 0.0;        // Hz
    double band_hi = 0.0;        // Hz
    double residual = 0.0;       // rms of log10 residuals
    size_t n_bins = 0;
};

// Ordinary least squares of log10 P on log10 f over bins inside [lo, hi];
// non-positive bins are skipped. Throws StatisticsError with fewer than 5.
PowerLawFit fit_powerlaw(const PsdEstimate &psd, double lo, double hi);

// Mean of the PSD over bins inside [lo, hi] (the white floor of a series).
double band_mean_power(const PsdEstimate &psd, double lo, double hi);

// `f_hz,psd_hz2_per_hz`
std::string psd_csv(const PsdEstimate &psd);

std::string_view method_name(PsdMethod method);

}  // namespace driftlock::spectra
