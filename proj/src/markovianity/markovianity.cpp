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

#include "driftlock/markovianity/markovianity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include <nlohmann/json.hpp>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/markovianity/chi_squared.hpp"
#include "driftlock/units.hpp"

namespace driftlock::markovianity {

namespace {

constexpr double kProbFloor = 1e-12;

bool result_less(const CircuitResult &a, const CircuitResult &b) {
    if (a.max_length != b.max_length) return a.max_length < b.max_length;
    return a.circuit_id < b.circuit_id;
}

void add_result(ViolationReport &report, const CircuitResult &r) {
    LengthAggregate &agg = report.by_length[r.max_length];
    agg.circuits += 1;
    if (r.statistic.infinite) {
        agg.infinite += 1;
    } else {
        agg.sum.add(r.statistic.value);
    }
    if (r.flag == Flag::violation) agg.violations += 1;
    if (!report.thresholds_used.contains(r.k)) report.thresholds_used[r.k] = thresholds(r.k, report.confidence);
}

}  // namespace

void CircuitRecord::validate() const {
    const std::string who = "circuit '" + circuit_id + "'";
    if (counts.size() != model_probs.size() || counts.size() != outcomes.size()) {
        throw ConfigError(who + ": outcome arity of counts and model probabilities differs");
    }
    if (counts.empty()) throw ConfigError(who + ": no outcomes");
    if (k < 1) throw ConfigError(who + ": k must be >= 1");
    if (total() < 1) throw ConfigError(who + ": total count must be >= 1");
    double sum = 0.0;
    for (double p : model_probs) {
        if (!(p >= 0 && p <= 1)) throw ConfigError(who + ": model probabilities must lie in [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError(who + ": model probabilities sum to " + format_double(sum) + ", not 1");
    }
}

std::uint64_t CircuitRecord::total() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

Statistic two_delta_loglik(const CircuitRecord &record) {
    record.validate();
    const double n = static_cast<double>(record.total());
    Statistic s;
    double acc = 0.0;
    for (size_t o = 0; o < record.counts.size(); ++o) {
        if (record.counts[o] == 0) continue;
        if (record.model_probs[o] == 0.0) {
            s.infinite = true;
            continue;
        }
        const double count = static_cast<double>(record.counts[o]);
        const double p = std::max(record.model_probs[o], kProbFloor);
        acc += count * std::log(count / n / p);
    }
    if (s.infinite) {
        s.value = std::numeric_limits<double>::infinity();
        return s;
    }
    // Guards tiny negative rounding when f equals p.
    s.value = std::max(0.0, 2.0 * acc);
    return s;
}

std::string_view flag_name(Flag flag) {
    switch (flag) {
        case Flag::consistent: return "consistent";
        case Flag::violation: return "violation";
        case Flag::fluctuation: return "fluctuation";
    }
    return "";
}

Thresholds thresholds(int k, double confidence) {
    if (k < 1) throw ConfigError("classify: k must be >= 1");
    if (!(confidence > 0.5 && confidence < 1)) throw ConfigError("classify: confidence must lie in (0.5, 1)");
    Thresholds t;
    t.k = k;
    t.confidence = confidence;
    const double dk = static_cast<double>(k);
    t.band_lo = dk - std::sqrt(2.0 * dk);
    t.band_hi = dk + std::sqrt(2.0 * dk);
    t.violation = chi_squared_quantile(confidence, dk);
    return t;
}

Flag classify(double statistic, int k, double confidence) {
    const Thresholds t = thresholds(k, confidence);
    if (statistic > t.band_lo && statistic < t.band_hi) return Flag::consistent;
    if (statistic > t.violation) return Flag::violation;
    return Flag::fluctuation;
}

double LengthAggregate::total() const {
    return infinite > 0 ? std::numeric_limits<double>::infinity() : sum.value();
}

ViolationReport aggregate(std::span<const CircuitRecord> records, double confidence) {
    if (records.empty()) throw ConfigError("aggregate: no records");
    ViolationReport report;
    report.confidence = confidence;
    for (const CircuitRecord &rec : records) {
        CircuitResult r;
        r.circuit_id = rec.circuit_id;
        r.germ = rec.germ;
        r.max_length = rec.max_length;
        r.k = rec.k;
        r.statistic = two_delta_loglik(rec);
        r.flag = r.statistic.infinite ? Flag::violation : classify(r.statistic.value, rec.k, confidence);
        report.per_circuit.push_back(r);
    }
    std::stable_sort(report.per_circuit.begin(), report.per_circuit.end(), result_less);
    for (const CircuitResult &r : report.per_circuit) add_result(report, r);
    return report;
}

ViolationReport merge(const ViolationReport &a, const ViolationReport &b) {
    if (a.confidence != b.confidence) throw ConfigError("merge: reports use different confidence levels");
    ViolationReport out = a;
    out.per_circuit.insert(out.per_circuit.end(), b.per_circuit.begin(), b.per_circuit.end());
    std::stable_sort(out.per_circuit.begin(), out.per_circuit.end(), result_less);
    for (const auto &[L, agg] : b.by_length) {
        LengthAggregate &dst = out.by_length[L];
        dst.sum.merge(agg.sum);
        dst.circuits += agg.circuits;
        dst.violations += agg.violations;
        dst.infinite += agg.infinite;
    }
    for (const auto &[k, t] : b.thresholds_used) out.thresholds_used.emplace(k, t);
    return out;
}

std::string format_one_decimal(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 1);
    (void)ec;
    std::string s(buf, ptr);
    if (s.ends_with(".0")) s.resize(s.size() - 2);
    if (s == "-0") s = "0";
    return s;
}

std::string ViolationReport::render_totals() const {
    std::vector<std::string> parts;
    for (const auto &[L, agg] : by_length) parts.push_back(format_one_decimal(agg.total()));
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += parts.size() == 2 ? " " : ", ";
        if (i > 0 && i + 1 == parts.size()) out += "and ";
        out += parts[i];
    }
    return out;
}

std::vector<CircuitRecord> parse_dataset_csv(std::string_view text, std::string_view source, std::optional<int> k) {
    const CsvTable table = parse_csv(text, source);
    const size_t c_id = table.column("circuit_id");
    const size_t c_germ = table.column("germ");
    const size_t c_len = table.column("L");
    const size_t c_out = table.column("outcome");
    const size_t c_count = table.column("count");
    const size_t c_prob = table.column("model_prob");
    std::optional<size_t> c_k;
    if (std::find(table.header.begin(), table.header.end(), "k") != table.header.end()) c_k = table.column("k");
    if (!c_k && !k) {
        throw ConfigError(std::string(source) + ": degrees of freedom k must be given (column `k` or explicit input)");
    }

    std::vector<CircuitRecord> records;
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto &row = table.rows[i];
        const std::string where = std::string(source) + ":" + std::to_string(table.line_numbers[i]);
        const auto integer = [&](size_t col, std::string_view name) {
            const double v = parse_number(row[col], where + " " + std::string(name));
            if (v < 0 || v != std::floor(v)) throw ConfigError(where + ": " + std::string(name) + " must be a non-negative integer");
            return v;
        };
        auto [it, inserted] = index.try_emplace(row[c_id], records.size());
        if (inserted) {
            CircuitRecord rec;
            rec.circuit_id = row[c_id];
            rec.germ = row[c_germ];
            rec.max_length = static_cast<std::int64_t>(integer(c_len, "L"));
            rec.k = c_k ? static_cast<int>(integer(*c_k, "k")) : *k;
            records.push_back(std::move(rec));
        }
        CircuitRecord &rec = records[it->second];
        if (rec.germ != row[c_germ] || rec.max_length != static_cast<std::int64_t>(integer(c_len, "L"))) {
            throw ConfigError(where + ": circuit '" + rec.circuit_id + "' changes germ or L between rows");
        }
        rec.outcomes.push_back(row[c_out]);
        rec.counts.push_back(static_cast<std::uint64_t>(integer(c_count, "count")));
        rec.model_probs.push_back(parse_number(row[c_prob], where + " model_prob"));
    }
    if (records.empty()) throw ConfigError(std::string(source) + ": dataset has no rows");
    for (const auto &rec : records) rec.validate();
    return records;
}

std::vector<CircuitRecord> read_dataset_csv(const std::filesystem::path &path, std::optional<int> k) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_dataset_csv(text, path.string(), k);
}

std::string per_circuit_csv(const ViolationReport &report) {
    CsvWriter out({"circuit_id", "germ", "L", "k", "two_delta_loglik", "flag"});
    for (const CircuitResult &r : report.per_circuit) {
        out.raw_row(std::vector<std::string>{r.circuit_id, r.germ, std::to_string(r.max_length), std::to_string(r.k),
                                             r.statistic.infinite ? "inf" : format_double(r.statistic.value),
                                             std::string(flag_name(r.flag))});
    }
    return out.text();
}

std::string report_json(const ViolationReport &report) {
    nlohmann::ordered_json j;
    j["confidence"] = report.confidence;
    j["thresholds"] = nlohmann::ordered_json::array();
    for (const auto &[k, t] : report.thresholds_used) {
        j["thresholds"].push_back({{"k", k}, {"band_lo", t.band_lo}, {"band_hi", t.band_hi},
                                   {"violation_threshold", t.violation}});
    }
    j["by_length"] = nlohmann::ordered_json::array();
    for (const auto &[L, agg] : report.by_length) {
        nlohmann::ordered_json e;
        e["L"] = L;
        if (agg.infinite > 0) {
            e["total_two_delta_loglik"] = "inf";
        } else {
            e["total_two_delta_loglik"] = agg.total();
        }
        e["circuits"] = agg.circuits;
        e["violations"] = agg.violations;
        e["infinite_evidence"] = agg.infinite;
        j["by_length"].push_back(e);
    }
    j["totals_rendered"] = report.render_totals();
    j["per_circuit"] = nlohmann::ordered_json::array();
    for (const CircuitResult &r : report.per_circuit) {
        nlohmann::ordered_json e;
        e["circuit_id"] = r.circuit_id;
        e["germ"] = r.germ;
        e["L"] = r.max_length;
        e["k"] = r.k;
        if (r.statistic.infinite) {
            e["two_delta_loglik"] = "inf";
        } else {
            e["two_delta_loglik"] = r.statistic.value;
        }
        e["flag"] = flag_name(r.flag);
        j["per_circuit"].push_back(e);
    }
    return j.dump(2) + "\n";
}

}  // namespace driftlock::markovianity
