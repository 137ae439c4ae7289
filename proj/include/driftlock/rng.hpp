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
#include <random>

namespace driftlock {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

// Deterministic stream derivation: every random consumer draws from
// stream_rng(seed, stream) where `stream` names the consumer (module tag
// combined with a row/cell/cycle index). Streams are independent of the
// order in which they are created, so row- or cell-parallel evaluation
// reproduces the sequential result.
Rng stream_rng(std::uint64_t seed, std::uint64_t stream);

// Stream tags for the modules that consume randomness.
namespace streams {
inline constexpr std::uint64_t kPowerLaw = 0x5057'4c41'0000'0000ULL;
inline constexpr std::uint64_t kTelegraph = 0x5254'4e00'0000'0000ULL;
inline constexpr std::uint64_t kWhite = 0x5748'4954'0000'0000ULL;
inline constexpr std::uint64_t kQuasiStatic = 0x5153'5441'0000'0000ULL;
inline constexpr std::uint64_t kRamseyRow = 0x5241'4d53'0000'0000ULL;
inline constexpr std::uint64_t kChevronCell = 0x4348'4556'0000'0000ULL;
inline constexpr std::uint64_t kFeedbackShots = 0x4642'4b00'0000'0000ULL;
inline constexpr std::uint64_t kBackaction = 0x4241'434b'0000'0000ULL;
}  // namespace streams

}  // namespace driftlock
