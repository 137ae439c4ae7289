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

#include <vector>

namespace driftlock {

// Order-independent floating-point accumulator (Shewchuk non-overlapping
// partials). value() is the correctly rounded sum of everything added, so
// merging two accumulators gives bit-for-bit the same result as adding
// the union of their inputs in any order.
class ExactSum {
public:
    void add(double x);
    void merge(const ExactSum &other);
    double value() const;

private:
    std::vector<double> partials_;
};

}  // namespace driftlock
