// Copyright 2026 The tigames Authors
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

// Counter-based random numbers.
//
// Every normal variate is a pure function of (seed, path, player, index):
//
//   key     = (seed & 0xffffffff, seed >> 32)
//   counter = (index / 2, player, path & 0xffffffff, path >> 32)
//   block   = Philox4x32-10(key, counter)
//   u1, u2  = 52-bit uniforms in (0, 1) from (block[0], block[1]) and
//             (block[2], block[3])
//   normal  = Box-Muller pair (r cos, r sin); element index % 2 is returned.
//
// Index 0 is reserved for the initial state, index k + 1 for the Brownian
// increment on step k.  Results never depend on evaluation order.

#include <array>
#include <cstdint>

namespace tigames {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

/// Uniform in the open interval (0, 1) from two 32-bit words.
double uniform_open01(std::uint32_t hi, std::uint32_t lo);

struct RngSpec {
  std::uint64_t seed = 0;
};

/// Standard normal addressed by (seed, path, player, index).
double philox_normal(std::uint64_t seed, std::uint64_t path, std::uint32_t player,
                     std::uint64_t index);

/// SplitMix64 finaliser; used to derive child seeds deterministically.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace tigames
