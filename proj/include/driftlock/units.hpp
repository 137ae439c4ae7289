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

#include <string>
#include <string_view>

namespace driftlock {

// Physical dimension of a configuration value. Frequencies, times and
// frequency PSDs are stored in SI (Hz, s, Hz^2/Hz); the device-side
// quantities keep the units their domain types are declared in.
enum class Dimension {
    frequency,        // Hz
    time,             // s
    frequency_psd,    // Hz^2/Hz
    voltage,          // mV
    length,           // nm
    length_psd,       // nm^2/Hz
    field_gradient,   // mT/nm
    gyromagnetic,     // MHz/mT
    angle,            // rad
};

std::string_view canonical_unit(Dimension dim);
std::string_view dimension_name(Dimension dim);

// Parses "<number>[/<number>] <unit>", e.g. "2 MHz", "40ns", "1/300 Hz",
// "0.00296 MHz^2/Hz". Returns the value in the canonical unit of `dim`.
// A bare number is rejected with a ConfigError naming `field`.
double parse_quantity(std::string_view text, Dimension dim, std::string_view field);

// Parses a plain number, optionally written as a ratio "a/b".
double parse_number(std::string_view text, std::string_view field);

}  // namespace driftlock
