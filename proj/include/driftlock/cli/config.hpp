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
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "driftlock/units.hpp"

namespace driftlock::cli {

// Inclusive/exclusive numeric bounds checked at parse time.
struct Range {
    double lo = -1e308;
    double hi = 1e308;
    bool lo_open = false;
    bool hi_open = false;

    static Range positive() { return {0.0, 1e308, true, false}; }
    static Range non_negative() { return {0.0, 1e308, false, false}; }
    static Range closed(double lo, double hi) { return {lo, hi, false, false}; }
};

// Flat key/value configuration. Accepts JSON objects or lines of
// `key = value` / `key: value` with '#' comments. Every physical quantity
// is a string with a unit suffix. Keys are consumed through the typed
// getters; reject_unknown() then fails on anything left over.
class Config {
public:
    static Config load(const std::filesystem::path &path);
    static Config parse(std::string_view text, std::string_view source);

    void set(const std::string &key, const std::string &value, const std::string &where);
    bool has(const std::string &key) const { return entries_.contains(key); }

    double quantity(const std::string &key, Dimension dim, std::optional<double> fallback = std::nullopt,
                    Range range = {});
    // Absent keys resolve to nullopt and are echoed as "auto".
    std::optional<double> optional_quantity(const std::string &key, Dimension dim, Range range = {});
    std::vector<double> quantity_list(const std::string &key, Dimension dim,
                                      std::optional<std::vector<double>> fallback = std::nullopt, Range range = {});
    double number(const std::string &key, std::optional<double> fallback = std::nullopt, Range range = {});
    std::vector<double> number_list(const std::string &key, std::optional<std::vector<double>> fallback = std::nullopt,
                                    Range range = {});
    std::int64_t integer(const std::string &key, std::optional<std::int64_t> fallback = std::nullopt,
                         std::int64_t min = INT64_MIN);
    std::uint64_t seed(const std::string &key);
    bool boolean(const std::string &key, std::optional<bool> fallback = std::nullopt);
    std::string text(const std::string &key, std::optional<std::string> fallback = std::nullopt);
    std::string choice(const std::string &key, std::initializer_list<std::string_view> options,
                       std::optional<std::string> fallback = std::nullopt);
    // Relative paths resolve against the config file's directory.
    std::filesystem::path path(const std::string &key);
    std::optional<std::filesystem::path> optional_path(const std::string &key);

    // Throws ConfigError naming every key no getter asked for.
    void reject_unknown(std::string_view scenario) const;

    // Resolved values in the order they were read, with canonical units.
    const std::vector<std::pair<std::string, std::string>> &resolved() const { return resolved_; }
    const std::filesystem::path &base_dir() const { return base_dir_; }

private:
    struct Entry {
        std::string value;
        std::string where;  // "file:line" for diagnostics
    };

    const Entry *lookup(const std::string &key);
    void record(const std::string &key, std::string value);
    std::string field(const std::string &key, const Entry *e) const;

    std::map<std::string, Entry> entries_;
    std::set<std::string> consumed_;
    std::vector<std::pair<std::string, std::string>> resolved_;
    std::filesystem::path base_dir_;
};

}  // namespace driftlock::cli
