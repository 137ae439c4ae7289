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

#include "driftlock/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

#include "driftlock/errors.hpp"

namespace driftlock {

namespace {

struct UnitScale {
    std::string_view symbol;
    double scale;
};

constexpr std::array kFrequencyUnits{
    UnitScale{"Hz", 1.0}, UnitScale{"mHz", 1e-3}, UnitScale{"kHz", 1e3},
    UnitScale{"MHz", 1e6}, UnitScale{"GHz", 1e9},
};
constexpr std::array kTimeUnits{
    UnitScale{"s", 1.0},    UnitScale{"ms", 1e-3}, UnitScale{"us", 1e-6},
    UnitScale{"µs", 1e-6}, UnitScale{"ns", 1e-9}, UnitScale{"ps", 1e-12},
    UnitScale{"min", 60.0},
};
constexpr std::array kFrequencyPsdUnits{
    UnitScale{"Hz^2/Hz", 1.0},  UnitScale{"Hz2/Hz", 1.0},
    UnitScale{"kHz^2/Hz", 1e6}, UnitScale{"kHz2/Hz", 1e6},
    UnitScale{"MHz^2/Hz", 1e12}, UnitScale{"MHz2/Hz", 1e12},
};
constexpr std::array kVoltageUnits{
    UnitScale{"mV", 1.0}, UnitScale{"V", 1e3}, UnitScale{"uV", 1e-3},
};
constexpr std::array kLengthUnits{
    UnitScale{"nm", 1.0}, UnitScale{"pm", 1e-3}, UnitScale{"um", 1e3},
};
constexpr std::array kLengthPsdUnits{
    UnitScale{"nm^2/Hz", 1.0}, UnitScale{"nm2/Hz", 1.0}, UnitScale{"pm^2/Hz", 1e-6},
};
constexpr std::array kGradientUnits{
    UnitScale{"mT/nm", 1.0}, UnitScale{"T/m", 1e-6},
};
constexpr std::array kGyromagneticUnits{
    UnitScale{"MHz/mT", 1.0}, UnitScale{"GHz/T", 1.0}, UnitScale{"Hz/T", 1e-9},
};
constexpr std::array kAngleUnits{
    UnitScale{"rad", 1.0}, UnitScale{"deg", std::numbers::pi / 180.0},
};

template <size_t N>
bool lookup(const std::array<UnitScale, N> &table, std::string_view symbol, double &scale) {
    for (const auto &u : table) {
        if (u.symbol == symbol) {
            scale = u.scale;
            return true;
        }
    }
    return false;
}

bool lookup_scale(Dimension dim, std::string_view symbol, double &scale) {
    switch (dim) {
        case Dimension::frequency: return lookup(kFrequencyUnits, symbol, scale);
        case Dimension::time: return lookup(kTimeUnits, symbol, scale);
        case Dimension::frequency_psd: return lookup(kFrequencyPsdUnits, symbol, scale);
        case Dimension::voltage: return lookup(kVoltageUnits, symbol, scale);
        case Dimension::length: return lookup(kLengthUnits, symbol, scale);
        case Dimension::length_psd: return lookup(kLengthPsdUnits, symbol, scale);
        case Dimension::field_gradient: return lookup(kGradientUnits, symbol, scale);
        case Dimension::gyromagnetic: return lookup(kGyromagneticUnits, symbol, scale);
        case Dimension::angle: return lookup(kAngleUnits, symbol, scale);
    }
    return false;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Consumes a leading floating-point literal; returns the unparsed remainder.
std::string_view take_number(std::string_view s, double &out, std::string_view field) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{}) {
        throw ConfigError("field '" + std::string(field) + "': cannot parse number from '" +
                          std::string(s) + "'");
    }
    return s.substr(static_cast<size_t>(ptr - s.data()));
}

// Parses "a" or "a/b" at the front of `s`.
std::string_view take_ratio(std::string_view s, double &out, std::string_view field) {
    std::string_view rest = take_number(s, out, field);
    // A '/' followed by a digit is a ratio; otherwise it belongs to the unit (e.g. "Hz^2/Hz").
    std::string_view after = trim(rest);
    if (after.size() >= 2 && after.front() == '/' &&
        (std::isdigit(static_cast<unsigned char>(after[1])) || after[1] == '.')) {
        double denom = 0;
        rest = take_number(trim(after.substr(1)), denom, field);
        if (denom == 0) {
            throw ConfigError("field '" + std::string(field) + "': division by zero");
        }
        out /= denom;
    }
    return rest;
}

}  // namespace

std::string_view canonical_unit(Dimension dim) {
    switch (dim) {
        case Dimension::frequency: return "Hz";
        case Dimension::time: return "s";
        case Dimension::frequency_psd: return "Hz^2/Hz";
        case Dimension::voltage: return "mV";
        case Dimension::length: return "nm";
        case Dimension::length_psd: return "nm^2/Hz";
        case Dimension::field_gradient: return "mT/nm";
        case Dimension::gyromagnetic: return "MHz/mT";
        case Dimension::angle: return "rad";
    }
    return "";
}

std::string_view dimension_name(Dimension dim) {
    switch (dim) {
        case Dimension::frequency: return "frequency";
        case Dimension::time: return "time";
        case Dimension::frequency_psd: return "frequency PSD";
        case Dimension::voltage: return "voltage";
        case Dimension::length: return "length";
        case Dimension::length_psd: return "displacement PSD";
        case Dimension::field_gradient: return "field gradient";
        case Dimension::gyromagnetic: return "gyromagnetic ratio";
        case Dimension::angle: return "angle";
    }
    return "";
}

double parse_number(std::string_view text, std::string_view field) {
    std::string_view s = trim(text);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0;
    std::string_view rest = trim(take_ratio(s, value, field));
    if (!rest.empty()) {
        throw ConfigError("field '" + std::string(field) + "': expected a plain number, got '" +
                          std::string(text) + "'");
    }
    if (!std::isfinite(value)) {
        throw ConfigError("field '" + std::string(field) + "': value must be finite");
    }
    return value;
}

double parse_quantity(std::string_view text, Dimension dim, std::string_view field) {
    std::string_view s = trim(text);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0;
    std::string_view unit = trim(take_ratio(s, value, field));
    if (unit.empty()) {
        throw ConfigError("field '" + std::string(field) + "': missing unit (expected a " +
                          std::string(dimension_name(dim)) + " such as '" +
                          std::string(canonical_unit(dim)) + "')");
    }
    double scale = 0;
    if (!lookup_scale(dim, unit, scale)) {
        throw ConfigError("field '" + std::string(field) + "': unit '" + std::string(unit) +
                          "' is not a " + std::string(dimension_name(dim)) + " unit");
    }
    if (!std::isfinite(value)) {
        throw ConfigError("field '" + std::string(field) + "': value must be finite");
    }
    return value * scale;
}

}  // namespace driftlock
