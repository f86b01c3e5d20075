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

#include "simulmt/align.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "simulmt/error.hpp"

namespace simulmt::align {

AlignmentSet::AlignmentSet(std::size_t source_len, std::size_t target_len, std::set<Link> links)
    : source_len_(source_len), target_len_(target_len) {
  for (const auto& l : links) add(l);
}

void AlignmentSet::add(Link link) {
  if (link.t < 1 || link.t > target_len_ || link.j < 1 || link.j > source_len_) {
    throw UsageError("alignment link (" + std::to_string(link.t) + "," + std::to_string(link.j) +
                     ") outside " + std::to_string(target_len_) + "x" + std::to_string(source_len_));
  }
  links_.insert(link);
}

double TranslationTable::prob(const std::string& source, const std::string& target) const {
  return prob_or(source, target, 0.0);
}

double TranslationTable::prob_or(const std::string& source, const std::string& target,
                                 double floor) const {
  auto it = table_.find(source);
  if (it == table_.end()) return floor;
  auto jt = it->second.find(target);
  return jt == it->second.end() ? floor : jt->second;
}

void TranslationTable::set(const std::string& source, const std::string& target, double p) {
  table_[source][target] = p;
}

std::vector<double> positional_prior(std::size_t t, std::size_t source_len, std::size_t target_len,
                                     const AlignerOptions& opts) {
  std::vector<double> prior(source_len + 1);
  prior[0] = opts.p_null;
  const double rel_t = static_cast<double>(t) / static_cast<double>(target_len);
  double z = 0.0;
  for (std::size_t j = 1; j <= source_len; ++j) {
    const double rel_j = static_cast<double>(j) / static_cast<double>(source_len);
    prior[j] = std::exp(-opts.lambda * std::abs(rel_t - rel_j));
    z += prior[j];
  }
  for (std::size_t j = 1; j <= source_len; ++j) prior[j] *= (1.0 - opts.p_null) / z;
  return prior;
}

namespace {

void check_options(const AlignerOptions& opts) {
  if (!(opts.lambda >= 0)) throw UsageError("aligner: lambda must be >= 0");
  if (!(opts.p_null >= 0 && opts.p_null < 1)) throw UsageError("aligner: p_null must be in [0,1)");
}

using Counts = std::map<std::string, std::map<std::string, double>>;

// One E-step pass; returns the corpus log-likelihood and fills expected counts.
double expectation(const std::vector<corpus::SentencePair>& pairs, const TranslationTable& table,
                   const AlignerOptions& opts, Counts* counts) {
  double ll = 0.0;
  std::vector<double> w;
  for (const auto& p : pairs) {
    const std::size_t n = p.source.size(), m = p.target.size();
    if (n == 0 || m == 0) continue;
    for (std::size_t t = 1; t <= m; ++t) {
      const auto& f = p.target[t - 1];
      auto prior = positional_prior(t, n, m, opts);
      w.assign(n + 1, 0.0);
      w[0] = prior[0] * table.prob(kNullToken, f);
      double z = w[0];
      for (std::size_t j = 1; j <= n; ++j) {
        w[j] = prior[j] * table.prob(p.source[j - 1], f);
        z += w[j];
      }
      if (!(z > 0)) throw NumericError("em_align: zero likelihood for pair " + std::to_string(p.id));
      ll += std::log(z);
      if (counts) {
        if (w[0] > 0) (*counts)[kNullToken][f] += w[0] / z;
        for (std::size_t j = 1; j <= n; ++j) (*counts)[p.source[j - 1]][f] += w[j] / z;
      }
    }
  }
  return ll;
}

}  // namespace

double log_likelihood(const std::vector<corpus::SentencePair>& pairs, const TranslationTable& table,
                      const AlignerOptions& opts) {
  return expectation(pairs, table, opts, nullptr);
}

EmResult em_align(const std::vector<corpus::SentencePair>& pairs, std::size_t iterations,
                  const AlignerOptions& opts) {
  if (pairs.empty()) throw UsageError("em_align: empty corpus");
  if (iterations < 1) throw UsageError("em_align: iterations must be >= 1");
  check_options(opts);

  // Uniform start over the target words each source word co-occurs with.
  std::map<std::string, std::set<std::string>> cooc;
  for (const auto& p : pairs) {
    for (const auto& f : p.target) {
      cooc[kNullToken].insert(f);
      for (const auto& e : p.source) cooc[e].insert(f);
    }
  }
  EmResult result;
  for (const auto& [e, fs] : cooc) {
    for (const auto& f : fs) result.table.set(e, f, 1.0 / static_cast<double>(fs.size()));
  }

  for (std::size_t it = 0; it < iterations; ++it) {
    Counts counts;
    result.log_likelihood.push_back(expectation(pairs, result.table, opts, &counts));
    TranslationTable next;
    for (const auto& [e, row] : counts) {
      double total = 0.0;
      for (const auto& [f, c] : row) total += c;
      if (!(total > 0)) continue;
      for (const auto& [f, c] : row) next.set(e, f, c / total);
    }
    result.table = std::move(next);
  }
  result.log_likelihood.push_back(log_likelihood(pairs, result.table, opts));
  return result;
}

AlignmentSet viterbi_align(const corpus::SentencePair& pair, const TranslationTable& table,
                           const AlignerOptions& opts) {
  check_options(opts);
  const std::size_t n = pair.source.size(), m = pair.target.size();
  AlignmentSet out(n, m);
  if (n == 0) return out;
  for (std::size_t t = 1; t <= m; ++t) {
    const auto& f = pair.target[t - 1];
    auto prior = positional_prior(t, n, m, opts);
    std::size_t best_j = 0;
    double best = -1.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double s = prior[j] * table.prob_or(pair.source[j - 1], f, opts.lexical_floor);
      if (s > best) {
        best = s;
        best_j = j;
      }
    }
    const double null_score = prior[0] * table.prob_or(kNullToken, f, opts.lexical_floor);
    if (null_score > best) continue;
    out.add({t, best_j});
  }
  return out;
}

std::string to_pharaoh(const AlignmentSet& alignment) {
  // Order by source then target index, as fast_align prints.
  std::set<std::pair<std::size_t, std::size_t>> sorted;
  for (const auto& l : alignment.links()) sorted.insert({l.j - 1, l.t - 1});
  std::string out;
  for (const auto& [j, t] : sorted) {
    if (!out.empty()) out += ' ';
    out += std::to_string(j) + '-' + std::to_string(t);
  }
  return out;
}

AlignmentSet from_pharaoh(const std::string& line, std::size_t source_len, std::size_t target_len) {
  AlignmentSet out(source_len, target_len);
  for (const auto& field : corpus::split_tokens(line)) {
    const auto dash = field.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == field.size()) {
      throw DataError("bad Pharaoh link '" + field + "'");
    }
    std::size_t j = 0, t = 0;
    try {
      std::size_t used = 0;
      j = std::stoul(field.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument(field);
      t = std::stoul(field.substr(dash + 1), &used);
      if (used != field.size() - dash - 1) throw std::invalid_argument(field);
    } catch (const std::logic_error&) {
      throw DataError("bad Pharaoh link '" + field + "'");
    }
    try {
      out.add({t + 1, j + 1});
    } catch (const UsageError& e) {
      throw DataError(e.what());
    }
  }
  return out;
}

void write_pharaoh(const std::filesystem::path& path, const std::vector<AlignmentSet>& alignments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& a : alignments) out << to_pharaoh(a) << '\n';
}

std::vector<AlignmentSet> read_pharaoh(const std::filesystem::path& path,
                                       const std::vector<corpus::SentencePair>& pairs) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<AlignmentSet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (lineno >= pairs.size()) {
      throw DataError(path.string() + ": more alignment lines than sentence pairs");
    }
    const auto& p = pairs[lineno];
    try {
      out.push_back(from_pharaoh(line, p.source.size(), p.target.size()));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno + 1) + ": " + e.what());
    }
    ++lineno;
  }
  if (out.size() != pairs.size()) {
    throw DataError(path.string() + ": " + std::to_string(out.size()) + " alignment lines for " +
                    std::to_string(pairs.size()) + " sentence pairs");
  }
  return out;
}

}  // namespace simulmt::align
