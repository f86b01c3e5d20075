// Copyright 2026 The simulmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "simulmt/models/model.hpp"

namespace synthetic {

using simulmt::models::EncodedPair;
using simulmt::models::TokenIds;
using simulmt::models::Vocabulary;

// Vocabulary of specials plus single-letter symbols a, b, c, ...
inline Vocabulary letters(int count) {
  Vocabulary v;
  for (int c = 0; c < count; ++c) v.add(std::string(1, static_cast<char>('a' + c)));
  return v;
}

// Sequences of distinct symbols, length 3 to 5; the target is the source
// itself or its reversal.
inline std::vector<EncodedPair> task(std::size_t count, bool reverse, std::uint64_t seed, int symbols = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(3, 5);
  std::vector<EncodedPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    TokenIds pool(static_cast<std::size_t>(symbols));
    for (int s = 0; s < symbols; ++s) pool[static_cast<std::size_t>(s)] = Vocabulary::kEos + 1 + s;
    std::shuffle(pool.begin(), pool.end(), rng);
    TokenIds src(pool.begin(), pool.begin() + length(rng));
    TokenIds tgt = src;
    if (reverse) std::reverse(tgt.begin(), tgt.end());
    out.push_back({src, tgt, i});
  }
  return out;
}

inline TokenIds with_eos(TokenIds t) {
  t.push_back(Vocabulary::kEos);
  return t;
}

}  // namespace synthetic
