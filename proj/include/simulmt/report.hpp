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
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Shared TSV plumbing for every report the tools read or write.
namespace simulmt::report {

inline constexpr const char* kToolVersion = "simulmt 1.0.0";

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Fixed six-decimal rendering, so reports are byte-stable.
std::string format_real(double value);

struct Table {
  std::vector<std::string> metadata;  // '#' lines without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::filesystem::path source;

  /// Throws DataError when the column is missing.
  std::size_t column(std::string_view name) const;
  std::size_t to_size(std::size_t row, std::size_t col) const;
  double to_real(std::size_t row, std::size_t col) const;
};

/// The first non-'#' line is the header; every row must have as many fields.
Table read_tsv(const std::filesystem::path& path);
void write_tsv(const std::filesystem::path& path, const std::vector<std::string>& metadata,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::vector<std::string> split_tabs(std::string_view line);

}  // namespace simulmt::report
