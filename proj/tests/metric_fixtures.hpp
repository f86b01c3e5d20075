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

#include <string>
#include <utility>
#include <vector>

namespace fixtures {

// (hypothesis, reference) pairs of at most eight tokens.
inline const std::vector<std::pair<std::string, std::string>>& metric_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs{
      {"the cat sat on the mat", "the cat sat on the mat"},
      {"cat the sat on mat the", "the cat sat on the mat"},
      {"b a", "a b"},
      {"a b c d e f", "d e f a b c"},
      {"the quick brown fox", "the fast brown fox"},
      {"he said that he would come", "he said he would come tomorrow"},
      {"", "a b c"},
      {"the the the the", "the cat"},
      {"a b c d e f g h", "h g f e d c b a"},
      {"we go home now", "now we go home"},
      {"in the morning i read", "i read in the morning"},
      {"x y z", "a b c"},
      {"a b a b a b", "b a b a b a"},
      {"the house is red and big", "the red house is big"},
      {"one two three", "one two three four five"},
      {"to be or not to be", "to be or not to be that"},
      {"new york is a city", "york new is a big city"},
      {"i i i i", "i"},
      {"she sells sea shells", "sea shells she sells"},
      {"a b c d", "c d a b x"},
  };
  return pairs;
}

}  // namespace fixtures
