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

#include "simulmt/latency.hpp"

#include <algorithm>
#include <fstream>

#include "simulmt/error.hpp"
#include "simulmt/report.hpp"

namespace simulmt::latency {

DecodingPath::DecodingPath(std::vector<std::size_t> z, std::size_t source_len)
    : z_(std::move(z)), source_len_(source_len) {
  if (source_len_ < 1) throw UsageError("decoding path: source length must be >= 1");
  std::size_t prev = 1;
  for (std::size_t t = 0; t < z_.size(); ++t) {
    if (z_[t] < 1 || z_[t] > source_len_) {
      throw UsageError("decoding path: z_" + std::to_string(t + 1) + " = " + std::to_string(z_[t]) +
                       " outside [1, " + std::to_string(source_len_) + "]");
    }
    if (z_[t] < prev) throw UsageError("decoding path: z decreases at t = " + std::to_string(t + 1));
    prev = z_[t];
  }
}

DecodingPath waitk_path(std::size_t k, std::size_t source_len, std::size_t target_len) {
  if (k < 1 || source_len < 1 || target_len < 1) {
    throw UsageError("waitk_path: k, source_len and target_len must be >= 1");
  }
  std::vector<std::size_t> z(target_len);
  for (std::size_t t = 1; t <= target_len; ++t) z[t - 1] = std::min(k + t - 1, source_len);
  return DecodingPath(std::move(z), source_len);
}

DecodingPath reference_path(const align::AlignmentSet& alignment) {
  const std::size_t m = alignment.target_len();
  std::vector<std::size_t> most(m + 1, 0);
  for (const auto& l : alignment.links()) most[l.t] = std::max(most[l.t], l.j);
  std::vector<std::size_t> z(m);
  std::size_t prev = 1;
  for (std::size_t t = 1; t <= m; ++t) {
    prev = std::max(prev, most[t]);
    z[t - 1] = prev;
  }
  return DecodingPath(std::move(z), alignment.source_len());
}

LatencyReport average_lagging(const DecodingPath& path) {
  const std::size_t m = path.target_len();
  if (m == 0) throw UsageError("average_lagging: empty path");
  const std::size_t n = path.source_len();
  std::size_t tau = m;
  for (std::size_t t = 1; t <= m; ++t) {
    if (path[t] == n) {
      tau = t;
      break;
    }
  }
  const double rate = static_cast<double>(n) / static_cast<double>(m);
  double sum = 0.0;
  for (std::size_t t = 1; t <= tau; ++t) {
    sum += static_cast<double>(path[t]) - rate * static_cast<double>(t - 1);
  }
  return {sum / static_cast<double>(tau), tau};
}

double lagging_difficulty(const corpus::SentencePair& pair, const align::AlignmentSet& alignment) {
  if (alignment.source_len() != pair.source.size() || alignment.target_len() != pair.target.size()) {
    throw UsageError("lagging_difficulty: alignment is " + std::to_string(alignment.target_len()) +
                     "x" + std::to_string(alignment.source_len()) + " but pair " +
                     std::to_string(pair.id) + " is " + std::to_string(pair.target.size()) + "x" +
                     std::to_string(pair.source.size()));
  }
  return average_lagging(reference_path(alignment)).al;
}

void write_factors(const std::filesystem::path& path, const std::vector<SegmentFactors>& rows,
                   const std::vector<std::string>& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& m : metadata) out << "# " << m << '\n';
  out << "id\tsrc_len\ttgt_len\tLD\tAL\n";
  for (const auto& r : rows) {
    out << r.id << '\t' << r.source_len << '\t' << r.target_len << '\t' << report::format_real(r.ld)
        << '\t' << report::format_real(r.al) << '\n';
  }
}

std::vector<SegmentFactors> read_factors(const std::filesystem::path& path) {
  auto table = report::read_tsv(path);
  const auto id = table.column("id"), sl = table.column("src_len"), tl = table.column("tgt_len"),
             ld = table.column("LD"), al = table.column("AL");
  std::vector<SegmentFactors> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    rows.push_back({table.to_size(r, id), table.to_size(r, sl), table.to_size(r, tl),
                    table.to_real(r, ld), table.to_real(r, al)});
  }
  return rows;
}

}  // namespace simulmt::latency
