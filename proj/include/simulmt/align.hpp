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
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "simulmt/corpus.hpp"

namespace simulmt::align {

/// 1-based (target position t, source position j) link.
struct Link {
  std::size_t t = 0;
  std::size_t j = 0;
  friend auto operator<=>(const Link&, const Link&) = default;
};

class AlignmentSet {
 public:
  AlignmentSet(std::size_t source_len, std::size_t target_len, std::set<Link> links = {});

  std::size_t source_len() const { return source_len_; }
  std::size_t target_len() const { return target_len_; }
  const std::set<Link>& links() const { return links_; }

  /// Throws UsageError when the link is out of bounds.
  void add(Link link);

  friend bool operator==(const AlignmentSet&, const AlignmentSet&) = default;

 private:
  std::size_t source_len_;
  std::size_t target_len_;
  std::set<Link> links_;
};

inline constexpr const char* kNullToken = "<null>";

/// Lexical translation probabilities p(target | source), including the null source.
class TranslationTable {
 public:
  double prob(const std::string& source, const std::string& target) const;
  /// Returns the stored probability or `floor` when the pair was never observed.
  double prob_or(const std::string& source, const std::string& target, double floor) const;
  void set(const std::string& source, const std::string& target, double p);

  const std::map<std::string, std::map<std::string, double>>& entries() const { return table_; }

 private:
  std::map<std::string, std::map<std::string, double>> table_;
};

struct AlignerOptions {
  double lambda = 4.0;           // diagonal tension
  double p_null = 0.08;          // prior mass of the null link
  double lexical_floor = 1e-7;   // probability of unseen (source, target) pairs
};

struct EmResult {
  TranslationTable table;
  /// Corpus log-likelihood before each M-step and once after the last one,
  /// so log_likelihood.size() == iterations + 1.
  std::vector<double> log_likelihood;
};

/// Diagonal positional prior of target position t (1-based) over source
/// positions, entry 0 being the null link and entry j the source position j.
std::vector<double> positional_prior(std::size_t t, std::size_t source_len, std::size_t target_len,
                                     const AlignerOptions& opts);

/// Trains the lexical table by EM with a fixed diagonal prior.
/// Throws UsageError on an empty corpus or zero iterations.
EmResult em_align(const std::vector<corpus::SentencePair>& pairs, std::size_t iterations,
                  const AlignerOptions& opts = {});

/// Corpus log-likelihood under a table; used by em_align and its tests.
double log_likelihood(const std::vector<corpus::SentencePair>& pairs, const TranslationTable& table,
                      const AlignerOptions& opts);

/// Each target token picks its best source position or stays unaligned when
/// the null link scores strictly higher. Ties go to the lowest source index.
AlignmentSet viterbi_align(const corpus::SentencePair& pair, const TranslationTable& table,
                           const AlignerOptions& opts = {});

// Pharaoh format: one line per sentence, space-separated "srcIdx-tgtIdx", both 0-based.
std::string to_pharaoh(const AlignmentSet& alignment);
AlignmentSet from_pharaoh(const std::string& line, std::size_t source_len, std::size_t target_len);
void write_pharaoh(const std::filesystem::path& path, const std::vector<AlignmentSet>& alignments);
/// Reads one alignment per pair; lengths come from the pairs.
std::vector<AlignmentSet> read_pharaoh(const std::filesystem::path& path,
                                       const std::vector<corpus::SentencePair>& pairs);

}  // namespace simulmt::align
