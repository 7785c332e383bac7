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


#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "tigames/rng.hpp"

namespace tigames {
namespace {

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const PhiloxCounter out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const PhiloxCounter out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Uniform, OpenInterval) {
  EXPECT_GT(uniform_open01(0, 0), 0.0);
  EXPECT_LT(uniform_open01(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(Normal, PureFunctionOfAddress) {
  EXPECT_EQ(philox_normal(9, 3, 1, 17), philox_normal(9, 3, 1, 17));
  EXPECT_NE(philox_normal(9, 3, 1, 17), philox_normal(9, 3, 1, 18));
  EXPECT_NE(philox_normal(9, 3, 1, 17), philox_normal(9, 4, 1, 17));
  EXPECT_NE(philox_normal(9, 3, 1, 17), philox_normal(9, 3, 0, 17));
  EXPECT_NE(philox_normal(9, 3, 1, 17), philox_normal(10, 3, 1, 17));
}

TEST(Normal, Moments) {
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int p = 0; p < n; ++p) {
    const double z = philox_normal(42, p, 0, 1);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(Normal, PairedDrawsUncorrelated) {
  const int n = 100000;
  double c = 0;
  for (int p = 0; p < n; ++p) c += philox_normal(5, p, 0, 2) * philox_normal(5, p, 0, 3);
  EXPECT_NEAR(c / n, 0.0, 4.0 / std::sqrt(n));
}

TEST(MixSeed, DistinctChildren) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t b = 0; b < 1000; ++b) seen.insert(mix_seed(7, b));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

}  // namespace
}  // namespace tigames
