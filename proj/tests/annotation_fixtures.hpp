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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "simulmt/annotation.hpp"

namespace fixtures {

using KnownCounts = std::map<std::string, long>;

// Per-type totals for two systems, summed over both annotators.
inline const std::vector<std::pair<std::string, KnownCounts>>& known_counts() {
  static const std::vector<std::pair<std::string, KnownCounts>> table{
      {"PA-offline",
       {{"ac", 12}, {"ad", 20}, {"mt", 433}, {"ne", 5}, {"om", 150}, {"ol", 40}, {"fl", 3}, {"du", 60},
        {"gr", 50}, {"ty", 10}, {"un", 8}, {"wo", 30}, {"ot", 7}}},
      {"PA-online",
       {{"ac", 4}, {"ad", 31}, {"mt", 517}, {"ne", 0}, {"om", 201}, {"ol", 22}, {"fl", 1}, {"du", 95},
        {"gr", 41}, {"ty", 2}, {"un", 19}, {"wo", 12}, {"ot", 0}}},
  };
  return table;
}

// Spreads each system's counts over two annotators and ten segments.
inline std::vector<std::pair<std::string, std::vector<simulmt::annotation::ErrorAnnotation>>> count_fixture() {
  std::vector<std::pair<std::string, std::vector<simulmt::annotation::ErrorAnnotation>>> out;
  for (const auto& [system, counts] : known_counts()) {
    std::vector<simulmt::annotation::ErrorAnnotation> anns;
    std::size_t k = 0;
    for (const auto& [code, n] : counts) {
      for (long i = 0; i < n; ++i, ++k) {
        simulmt::annotation::ErrorAnnotation a;
        a.segment_id = k % 10;
        a.annotator = k % 2 == 0 ? "A" : "B";
        a.code = code;
        a.target = {k % 5, k % 5 + 1};
        anns.push_back(a);
      }
    }
    out.emplace_back(system, std::move(anns));
  }
  return out;
}

// Ten tokens: four marked by both, four by neither, one by each alone.
inline std::pair<std::vector<std::string>, std::vector<std::string>> kappa_confusion(const std::string& code) {
  return {{code, code, code, code, "none", "none", "none", "none", code, "none"},
          {code, code, code, code, "none", "none", "none", "none", "none", code}};
}

}  // namespace fixtures
