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

#include "simulmt/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "simulmt/error.hpp"

namespace simulmt::corpus {

Tokens split_tokens(std::string_view line) {
  Tokens out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<Tokens> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Tokens> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(split_tokens(line));
  return lines;
}

void write_lines(const std::filesystem::path& path, const std::vector<Tokens>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& l : lines) out << join_tokens(l) << '\n';
}

std::vector<SentencePair> read_parallel(const std::filesystem::path& source_path,
                                        const std::filesystem::path& target_path) {
  auto src = read_lines(source_path);
  auto tgt = read_lines(target_path);
  if (src.size() != tgt.size()) {
    throw DataError("parallel files differ in length: " + source_path.string() + " has " +
                    std::to_string(src.size()) + " lines, " + target_path.string() + " has " +
                    std::to_string(tgt.size()));
  }
  std::vector<SentencePair> pairs(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    pairs[i] = {std::move(src[i]), std::move(tgt[i]), i};
  }
  return pairs;
}

std::vector<SentencePair> filter_pairs(const std::vector<SentencePair>& pairs,
                                       std::size_t max_len, double max_ratio) {
  if (max_len < 1) throw UsageError("filter_pairs: max_len must be >= 1");
  if (!(max_ratio > 0)) throw UsageError("filter_pairs: max_ratio must be > 0");
  std::vector<SentencePair> kept;
  for (const auto& p : pairs) {
    const auto ns = p.source.size(), nt = p.target.size();
    if (ns == 0 || nt == 0 || ns > max_len || nt > max_len) continue;
    const double ratio = static_cast<double>(std::max(ns, nt)) / static_cast<double>(std::min(ns, nt));
    if (ratio > max_ratio) continue;
    kept.push_back(p);
  }
  return kept;
}

// ---------------------------------------------------------------------------

MergeTable::MergeTable(std::vector<MergeRule> rules) : rules_(std::move(rules)) {
  std::set<MergeRule> seen;
  for (const auto& r : rules_) {
    if (!seen.insert(r).second) {
      throw UsageError("duplicate merge rule: " + r.first + " " + r.second);
    }
  }
}

std::size_t MergeTable::rank(const std::string& left, const std::string& right) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].first == left && rules_[i].second == right) return i;
  }
  return npos;
}

void MergeTable::save(std::ostream& out) const {
  for (const auto& [l, r] : rules_) out << l << ' ' << r << '\n';
}

MergeTable MergeTable::load(std::istream& in) {
  std::vector<MergeRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_tokens(line);
    if (f.empty()) continue;
    if (f.size() != 2) {
      throw DataError("merge table line " + std::to_string(lineno) + ": expected 'left right'");
    }
    rules.emplace_back(std::move(f[0]), std::move(f[1]));
  }
  try {
    return MergeTable(std::move(rules));
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
}

void MergeTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save(out);
}

MergeTable MergeTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return load(in);
}

std::vector<std::string> utf8_chars(std::string_view word) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto c = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    len = std::min(len, word.size() - i);
    out.emplace_back(word.substr(i, len));
    i += len;
  }
  return out;
}

namespace {

using Symbols = std::vector<std::string>;

Symbols initial_symbols(std::string_view word) {
  auto s = utf8_chars(word);
  s.emplace_back(kEndOfWord);
  return s;
}

// Merges every non-overlapping occurrence of (left, right), scanning left to right.
void merge_in_place(Symbols& s, const std::string& left, const std::string& right) {
  Symbols out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (i + 1 < s.size() && s[i] == left && s[i + 1] == right) {
      out.push_back(left + right);
      i += 2;
    } else {
      out.push_back(std::move(s[i]));
      ++i;
    }
  }
  s = std::move(out);
}

class PairStats {
 public:
  void add(const Symbols& s, long weight, std::size_t word) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      MergeRule p{s[i], s[i + 1]};
      long& c = counts_[p];
      if (c > 0) ranked_.erase({-c, p});
      c += weight;
      if (c > 0) ranked_.insert({-c, p});
      if (weight > 0) where_[p].insert(word);
    }
  }

  // Highest count first, then smallest (left, right).
  bool best(MergeRule& rule, long& count) const {
    if (ranked_.empty()) return false;
    const auto& top = *ranked_.begin();
    count = -top.first;
    rule = top.second;
    return true;
  }

  std::set<std::size_t> words_with(const MergeRule& p) const {
    auto it = where_.find(p);
    return it == where_.end() ? std::set<std::size_t>{} : it->second;
  }

 private:
  std::map<MergeRule, long> counts_;
  std::set<std::pair<long, MergeRule>> ranked_;
  std::map<MergeRule, std::set<std::size_t>> where_;
};

}  // namespace

MergeTable bpe_learn(const std::vector<Tokens>& corpus, std::size_t num_merges) {
  if (corpus.empty()) throw UsageError("bpe_learn: empty corpus");

  std::map<std::string, long> freq;
  for (const auto& line : corpus) {
    for (const auto& w : line) ++freq[w];
  }
  std::vector<Symbols> words;
  std::vector<long> counts;
  for (const auto& [w, c] : freq) {
    words.push_back(initial_symbols(w));
    counts.push_back(c);
  }

  PairStats stats;
  for (std::size_t i = 0; i < words.size(); ++i) stats.add(words[i], counts[i], i);

  std::vector<MergeRule> rules;
  while (rules.size() < num_merges) {
    MergeRule best;
    long count = 0;
    if (!stats.best(best, count) || count < 2) break;
    for (std::size_t w : stats.words_with(best)) {
      stats.add(words[w], -counts[w], w);
      merge_in_place(words[w], best.first, best.second);
      stats.add(words[w], counts[w], w);
    }
    rules.push_back(std::move(best));
  }
  return MergeTable(std::move(rules));
}

Tokens bpe_apply(const MergeTable& table, std::string_view word) {
  if (word.empty()) throw UsageError("bpe_apply: empty word");
  Symbols s = initial_symbols(word);
  std::map<MergeRule, std::size_t> ranks;
  for (std::size_t i = 0; i < table.size(); ++i) ranks.emplace(table.rules()[i], i);

  while (s.size() > 1) {
    std::size_t best_rank = MergeTable::npos;
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      auto it = ranks.find({s[i], s[i + 1]});
      if (it != ranks.end() && it->second < best_rank) {
        best_rank = it->second;
        best_at = i;
      }
    }
    if (best_rank == MergeTable::npos) break;
    const std::string left = s[best_at], right = s[best_at + 1];
    merge_in_place(s, left, right);
  }

  const std::string eow(kEndOfWord);
  if (s.back() == eow) {
    s.pop_back();
  } else {
    s.back().erase(s.back().size() - eow.size());
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] += kContinuation;
  return s;
}

Tokens bpe_apply_sentence(const MergeTable& table, const Tokens& words) {
  Tokens out;
  for (const auto& w : words) {
    auto pieces = bpe_apply(table, w);
    out.insert(out.end(), pieces.begin(), pieces.end());
  }
  return out;
}

Tokens bpe_restore(const Tokens& pieces) {
  Tokens out;
  std::string current;
  bool open = false;
  const std::string marker(kContinuation);
  for (const auto& p : pieces) {
    if (p.size() >= marker.size() && p.compare(p.size() - marker.size(), marker.size(), marker) == 0) {
      current += p.substr(0, p.size() - marker.size());
      open = true;
    } else {
      current += p;
      out.push_back(std::move(current));
      current.clear();
      open = false;
    }
  }
  if (open) out.push_back(std::move(current));
  return out;
}

}  // namespace simulmt::corpus
