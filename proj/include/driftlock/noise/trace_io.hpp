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

#include <filesystem>
#include <string>

#include "driftlock/noise/noise_models.hpp"

namespace driftlock::noise {

// CSV with header `time_s,delta_f_hz`, one row per sample at t = j*dt.
std::string trace_to_csv(const NoiseTrace &trace);
NoiseTrace trace_from_csv(const std::filesystem::path &path);

// JSON envelope {"dt_s", "seed", "descriptor", "samples_hz"}.
std::string trace_to_json(const NoiseTrace &trace);
NoiseTrace trace_from_json(const std::filesystem::path &path);

}  // namespace driftlock::noise
