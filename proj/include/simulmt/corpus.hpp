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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace simulmt::corpus {

using Tokens = std::vector<std::string>;

struct SentencePair {
  Tokens source;
  Tokens target;
  std::size_t id = 0;
};

/// Splits on ASCII whitespace; empty fields are dropped.
Tokens split_tokens(std::string_view line);
std::string join_tokens(const Tokens& tokens);

/// Reads two line-aligned files into pairs numbered from 0.
/// Throws DataError when the line counts differ.
std::vector<SentencePair> read_parallel(const std::filesystem::path& source_path,
                                        const std::filesystem::path& target_path);
std::vector<Tokens> read_lines(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, const std::vector<Tokens>& lines);

/// Keeps pairs whose sides are non-empty, at most `max_len` tokens long,
/// and whose length ratio (longer over shorter) is at most `max_ratio`.
std::vector<SentencePair> filter_pairs(const std::vector<SentencePair>& pairs,
                                       std::size_t max_len, double max_ratio);

// ---------------------------------------------------------------------------
// Byte pair encoding

inline constexpr std::string_view kEndOfWord = "</w>";
inline constexpr std::string_view kContinuation = "@@";

using MergeRule = std::pair<std::string, std::string>;

/// Ordered merge rules; the rank of a rule is its index.
class MergeTable {
 public:
  MergeTable() = default;
  /// Throws UsageError on a duplicate rule.
  explicit MergeTable(std::vector<MergeRule> rules);

  const std::vector<MergeRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  /// Rank of (left, right), or npos when the pair is not a rule.
  std::size_t rank(const std::string& left, const std::string& right) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void save(std::ostream& out) const;
  static MergeTable load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static MergeTable load(const std::filesystem::path& path);

  friend bool operator==(const MergeTable&, const MergeTable&) = default;

 private:
  std::vector<MergeRule> rules_;
};

/// Splits a word into UTF-8 code points.
std::vector<std::string> utf8_chars(std::string_view word);

/// Learns up to `num_merges` rules. Words are split into characters followed by
/// the end-of-word symbol; each round merges the most frequent adjacent pair,
/// ties going to the lexicographically smallest (left, right). Stops early once
/// no pair occurs at least twice.
MergeTable bpe_learn(const std::vector<Tokens>& corpus, std::size_t num_merges);

/// Segments one word. All pieces but the last carry the "@@" suffix.
Tokens bpe_apply(const MergeTable& table, std::string_view word);
Tokens bpe_apply_sentence(const MergeTable& table, const Tokens& words);

/// Joins "@@"-suffixed pieces back into words.
Tokens bpe_restore(const Tokens& pieces);

}  // namespace simulmt::corpus
