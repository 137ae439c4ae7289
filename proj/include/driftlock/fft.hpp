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

#include <complex>
#include <span>
#include <vector>

namespace driftlock::fft {

// Unnormalized real-to-half-complex DFT: X_k = sum_j x_j exp(-2 pi i j k / n),
// k = 0..n/2.
std::vector<std::complex<double>> forward_real(std::span<const double> x);

// Unnormalized inverse of forward_real for a Hermitian spectrum of n/2+1 bins:
// x_j = sum_{k=0}^{n-1} X_k exp(+2 pi i j k / n).
std::vector<double> inverse_real(std::span<const std::complex<double>> half_spectrum, size_t n);

}  // namespace driftlock::fft
