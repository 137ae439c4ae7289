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

namespace driftlock::markovianity {

// Regularized lower incomplete gamma P(a, x): series below a + 1, Lentz
// continued fraction for Q above.
double regularized_gamma_p(double a, double x);

double chi_squared_cdf(double x, double k);

// x with chi_squared_cdf(x, k) = p, relative accuracy ~1e-12.
double chi_squared_quantile(double p, double k);

}  // namespace driftlock::markovianity
