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

#include "driftlock/rng.hpp"

#include <array>

namespace driftlock {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
    const std::array<std::uint64_t, 3> words{mix64(seed), mix64(stream ^ 0x6a09e667f3bcc909ULL),
                                             mix64(mix64(seed) ^ stream)};
    std::array<std::uint32_t, 6> halves{};
    for (size_t i = 0; i < words.size(); ++i) {
        halves[2 * i] = static_cast<std::uint32_t>(words[i]);
        halves[2 * i + 1] = static_cast<std::uint32_t>(words[i] >> 32);
    }
    std::seed_seq seq(halves.begin(), halves.end());
    return Rng(seq);
}

}  // namespace driftlock
