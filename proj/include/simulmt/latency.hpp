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

#include <cstddef>
#include <filesystem>
#include <vector>

#include "simulmt/align.hpp"
#include "simulmt/corpus.hpp"

namespace simulmt::latency {

/// Monotone read schedule: z[t-1] is the number of source tokens read before
/// writing target token t.
class DecodingPath {
 public:
  /// Throws UsageError unless 1 <= z_t <= source_len, z is non-decreasing and
  /// z.size() == target_len.
  DecodingPath(std::vector<std::size_t> z, std::size_t source_len);

  const std::vector<std::size_t>& z() const { return z_; }
  std::size_t operator[](std::size_t t) const { return z_.at(t - 1); }  // 1-based
  std::size_t source_len() const { return source_len_; }
  std::size_t target_len() const { return z_.size(); }

  friend bool operator==(const DecodingPath&, const DecodingPath&) = default;

 private:
  std::vector<std::size_t> z_;
  std::size_t source_len_;
};

struct LatencyReport {
  double al = 0.0;       // average lagging, in source tokens
  std::size_t tau = 0;   // first step where the whole source has been read
};

/// z_t = min(k + t - 1, source_len).
DecodingPath waitk_path(std::size_t k, std::size_t source_len, std::size_t target_len);

/// Smallest non-decreasing path covering every link, starting from z_0 = 1.
/// Unaligned target positions keep the previous value.
DecodingPath reference_path(const align::AlignmentSet& alignment);

/// Average lagging up to tau; when the path never reaches the end of the
/// source, tau falls back to the target length.
LatencyReport average_lagging(const DecodingPath& path);

/// Average lagging of the alignment's reference path.
double lagging_difficulty(const corpus::SentencePair& pair, const align::AlignmentSet& alignment);

/// One row of the per-segment factor file.
struct SegmentFactors {
  std::size_t id = 0;
  std::size_t source_len = 0;
  std::size_t target_len = 0;
  double ld = 0.0;
  double al = 0.0;
};

// TSV with header "id\tsrc_len\ttgt_len\tLD\tAL"; lines starting with '#' are metadata.
void write_factors(const std::filesystem::path& path, const std::vector<SegmentFactors>& rows,
                   const std::vector<std::string>& metadata = {});
std::vector<SegmentFactors> read_factors(const std::filesystem::path& path);

}  // namespace simulmt::latency
