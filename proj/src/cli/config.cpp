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

#include "driftlock/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"

namespace driftlock::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t comma = s.find(',', start);
        out.emplace_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void check_range(double v, const Range &r, const std::string &field) {
    const bool lo_ok = r.lo_open ? v > r.lo : v >= r.lo;
    const bool hi_ok = r.hi_open ? v < r.hi : v <= r.hi;
    if (lo_ok && hi_ok) return;
    std::string bound;
    if (!lo_ok) bound = std::string(r.lo_open ? "> " : ">= ") + format_double(r.lo);
    else bound = std::string(r.hi_open ? "< " : "<= ") + format_double(r.hi);
    throw ConfigError(field + ": value " + format_double(v) + " violates the range invariant (must be " + bound + ")");
}

std::string json_scalar(const nlohmann::json &v, const std::string &where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return v.dump();
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += ", ";
            out += json_scalar(v[i], where);
        }
        return out;
    }
    throw ConfigError(where + ": values must be strings, numbers, booleans or flat arrays");
}

}  // namespace

Config Config::load(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Config cfg = parse(text, path.string());
    cfg.base_dir_ = path.parent_path();
    return cfg;
}

Config Config::parse(std::string_view text, std::string_view source) {
    Config cfg;
    const std::string src(source);
    const std::string_view body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error &e) {
            throw ConfigError(src + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
        }
        if (!j.is_object()) throw ConfigError(src + ": top level must be an object");
        for (const auto &[key, value] : j.items()) {
            if (value.is_object()) {
                throw ConfigError(src + ": key '" + key + "' holds an object; use flat dotted keys");
            }
            cfg.set(key, json_scalar(value, src + " key '" + key + "'"), src + " key '" + key + "'");
        }
        return cfg;
    }

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string where = src + ":" + std::to_string(line_no);
        if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        const size_t colon = line.find(':');
        const size_t sep = std::min(eq, colon);
        if (sep == std::string_view::npos) {
            throw ConfigError(where + ": parse error, expected `key = value` or `key: value`");
        }
        const std::string key(trim(line.substr(0, sep)));
        if (key.empty()) throw ConfigError(where + ": parse error, empty key");
        cfg.set(key, unquote(line.substr(sep + 1)), where);
    }
    return cfg;
}

void Config::set(const std::string &key, const std::string &value, const std::string &where) {
    if (entries_.contains(key) && where.find("override") == std::string::npos) {
        throw ConfigError(where + ": duplicate key '" + key + "' (first set at " + entries_.at(key).where + ")");
    }
    entries_[key] = {value, where};
}

const Config::Entry *Config::lookup(const std::string &key) {
    consumed_.insert(key);
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void Config::record(const std::string &key, std::string value) {
    for (auto &[k, v] : resolved_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    resolved_.emplace_back(key, std::move(value));
}

std::string Config::field(const std::string &key, const Entry *e) const {
    return e ? e->where + ": field '" + key + "'" : "field '" + key + "'";
}

namespace {

// Unit and number parsers name the bare key; prefix the source location.
template <typename Fn>
auto located(const std::string &where, Fn &&fn) {
    try {
        return fn();
    } catch (const ConfigError &e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace

double Config::quantity(const std::string &key, Dimension dim, std::optional<double> fallback, Range range) {
    const Entry *e = lookup(key);
    double v = 0;
    if (e) {
        v = located(e->where, [&] { return parse_quantity(e->value, dim, key); });
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required field '" + key + "'");
    }
    check_range(v, range, field(key, e));
    record(key, format_double(v) + " " + std::string(canonical_unit(dim)));
    return v;
}

std::optional<double> Config::optional_quantity(const std::string &key, Dimension dim, Range range) {
    if (!has(key)) {
        consumed_.insert(key);
        record(key, "auto");
        return std::nullopt;
    }
    return quantity(key, dim, std::nullopt, range);
}

std::vector<double> Config::quantity_list(const std::string &key, Dimension dim,
                                          std::optional<std::vector<double>> fallback, Range range) {
    const Entry *e = lookup(key);
    std::vector<double> out;
    if (e) {
        for (const std::string &item : split_list(e->value)) out.push_back(located(e->where, [&] { return parse_quantity(item, dim, key); }));
    } else if (fallback) {
        out = *fallback;
    } else {
        throw ConfigError("missing required field '" + key + "'");
    }
    std::string rendered;
    for (double v : out) {
        check_range(v, range, field(key, e));
        if (!rendered.empty()) rendered += ", ";
        rendered += format_double(v) + " " + std::string(canonical_unit(dim));
    }
    record(key, rendered);
    return out;
}

double Config::number(const std::string &key, std::optional<double> fallback, Range range) {
    const Entry *e = lookup(key);
    double v = 0;
    if (e) {
        v = located(e->where, [&] { return parse_number(e->value, key); });
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required field '" + key + "'");
    }
    check_range(v, range, field(key, e));
    record(key, format_double(v));
    return v;
}

std::vector<double> Config::number_list(const std::string &key, std::optional<std::vector<double>> fallback,
                                        Range range) {
    const Entry *e = lookup(key);
    std::vector<double> out;
    if (e) {
        for (const std::string &item : split_list(e->value)) out.push_back(located(e->where, [&] { return parse_number(item, key); }));
    } else if (fallback) {
        out = *fallback;
    } else {
        throw ConfigError("missing required field '" + key + "'");
    }
    std::string rendered;
    for (double v : out) {
        check_range(v, range, field(key, e));
        if (!rendered.empty()) rendered += ", ";
        rendered += format_double(v);
    }
    record(key, rendered);
    return out;
}

std::int64_t Config::integer(const std::string &key, std::optional<std::int64_t> fallback, std::int64_t min) {
    const Entry *e = lookup(key);
    std::int64_t v = 0;
    if (e) {
        const double d = located(e->where, [&] { return parse_number(e->value, key); });
        if (d != std::floor(d) || std::abs(d) > 9.0e15) {
            throw ConfigError(field(key, e) + ": expected an integer, got '" + e->value + "'");
        }
        v = static_cast<std::int64_t>(d);
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required field '" + key + "'");
    }
    if (v < min) {
        throw ConfigError(field(key, e) + ": value " + std::to_string(v) + " violates the range invariant (must be >= " +
                          std::to_string(min) + ")");
    }
    record(key, std::to_string(v));
    return v;
}

std::uint64_t Config::seed(const std::string &key) {
    const Entry *e = lookup(key);
    if (!e) throw ConfigError("missing required field '" + key + "' (the seed is mandatory)");
    const std::string_view s = trim(e->value);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(field(key, e) + ": expected a non-negative integer seed, got '" + e->value + "'");
    }
    record(key, std::to_string(v));
    return v;
}

bool Config::boolean(const std::string &key, std::optional<bool> fallback) {
    const Entry *e = lookup(key);
    bool v = false;
    if (e) {
        const std::string_view s = trim(e->value);
        if (s == "true" || s == "yes" || s == "on" || s == "1") v = true;
        else if (s == "false" || s == "no" || s == "off" || s == "0") v = false;
        else throw ConfigError(field(key, e) + ": expected true or false, got '" + e->value + "'");
    } else if (fallback) {
        v = *fallback;
    } else {
        throw ConfigError("missing required field '" + key + "'");
    }
    record(key, v ? "true" : "false");
    return v;
}

std::string Config::text(const std::string &key, std::optional<std::string> fallback) {
    const Entry *e = lookup(key);
    std::string v;
    if (e) v = std::string(trim(e->value));
    else if (fallback) v = *fallback;
    else throw ConfigError("missing required field '" + key + "'");
    record(key, v);
    return v;
}

std::string Config::choice(const std::string &key, std::initializer_list<std::string_view> options,
                           std::optional<std::string> fallback) {
    const Entry *e = lookup(key);
    const std::string v = e ? std::string(trim(e->value)) : fallback.value_or("");
    if (!e && !fallback) throw ConfigError("missing required field '" + key + "'");
    if (std::find(options.begin(), options.end(), v) == options.end()) {
        std::string list;
        for (auto o : options) list += (list.empty() ? "" : ", ") + std::string(o);
        throw ConfigError(field(key, e) + ": '" + v + "' is not one of {" + list + "}");
    }
    record(key, v);
    return v;
}

std::filesystem::path Config::path(const std::string &key) {
    auto p = optional_path(key);
    if (!p) throw ConfigError("missing required field '" + key + "'");
    return *p;
}

std::optional<std::filesystem::path> Config::optional_path(const std::string &key) {
    const Entry *e = lookup(key);
    if (!e) return std::nullopt;
    std::filesystem::path p(std::string(trim(e->value)));
    record(key, p.generic_string());
    if (p.is_relative()) p = base_dir_ / p;
    return p;
}

void Config::reject_unknown(std::string_view scenario) const {
    std::string unknown;
    for (const auto &[key, entry] : entries_) {
        if (!consumed_.contains(key)) unknown += "\n  " + entry.where + ": '" + key + "'";
    }
    if (!unknown.empty()) {
        throw ConfigError("unknown key(s) for scenario '" + std::string(scenario) + "':" + unknown);
    }
}

}  // namespace driftlock::cli
