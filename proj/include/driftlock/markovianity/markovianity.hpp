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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftlock/exact_sum.hpp"

namespace driftlock::markovianity {

struct CircuitRecord {
    std::string circuit_id;
    std::string germ;
    std::int64_t max_length = 1;
    std::vector<std::string> outcomes;  // labels, parallel to counts/model_probs
    std::vector<std::uint64_t> counts;
    std::vector<double> model_probs;
    int k = 1;  // independent outcomes per circuit; always supplied, never inferred

    void validate() const;
    std::uint64_t total() const;
};

struct Statistic {
    double value = 0.0;
    // An observed outcome the model gives probability exactly 0.
    bool infinite = false;
};

// 2 sum_o N_o ln(f_o / p_o); unobserved outcomes contribute 0, observed
// p_o are clamped to >= 1e-12 unless exactly 0.
Statistic two_delta_loglik(const CircuitRecord &record);

enum class Flag { consistent, violation, fluctuation };
std::string_view flag_name(Flag flag);

struct Thresholds {
    int k = 1;
    double confidence = 0.95;
    double band_lo = 0.0;    // k - sqrt(2k)
    double band_hi = 0.0;    // k + sqrt(2k)
    double violation = 0.0;  // chi^2_k quantile at `confidence`
};

Thresholds thresholds(int k, double confidence);

// consistent strictly inside (band_lo, band_hi); violation above the
// chi^2_k quantile; fluctuation otherwise.
Flag classify(double statistic, int k, double confidence);

struct CircuitResult {
    std::string circuit_id;
    std::string germ;
    std::int64_t max_length = 1;
    int k = 1;
    Statistic statistic;
    Flag flag = Flag::consistent;
};

struct LengthAggregate {
    ExactSum sum;  // finite statistics only
    size_t circuits = 0;
    size_t violations = 0;
    size_t infinite = 0;

    // +inf if any member was an infinite-evidence violation.
    double total() const;
};

struct ViolationReport {
    double confidence = 0.95;
    std::vector<CircuitResult> per_circuit;           // ordered by (L, circuit_id)
    std::map<std::int64_t, LengthAggregate> by_length;
    std::map<int, Thresholds> thresholds_used;

    // Per-length totals to one decimal, trailing zeros trimmed, joined as
    // "a, b, c, and d".
    std::string render_totals() const;
};

ViolationReport aggregate(std::span<const CircuitRecord> records, double confidence = 0.95);

// Merges two reports; per-length totals equal aggregate() of the union.
ViolationReport merge(const ViolationReport &a, const ViolationReport &b);

// CSV `circuit_id,germ,L,outcome,count,model_prob[,k]`. Rows of one circuit
// share circuit_id. k comes from the optional column or from `k` (which
// must then be given).
std::vector<CircuitRecord> read_dataset_csv(const std::filesystem::path &path, std::optional<int> k);
std::vector<CircuitRecord> parse_dataset_csv(std::string_view text, std::string_view source, std::optional<int> k);

// `circuit_id,germ,L,k,two_delta_loglik,flag`
std::string per_circuit_csv(const ViolationReport &report);
std::string report_json(const ViolationReport &report);

// Number rendering used in render_totals.
std::string format_one_decimal(double value);

}  // namespace driftlock::markovianity
