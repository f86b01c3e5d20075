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

// Slow reference implementations used only as test oracles. They share no
// code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Words = std::vector<std::string>;

inline std::size_t count_ngram(const Words& s, const Words& gram) {
  std::size_t c = 0;
  for (std::size_t i = 0; i + gram.size() <= s.size(); ++i) {
    bool same = true;
    for (std::size_t k = 0; k < gram.size(); ++k) same = same && s[i + k] == gram[k];
    c += same ? 1 : 0;
  }
  return c;
}

struct Counts {
  std::vector<double> match, total;
  double hyp_len = 0, ref_len = 0;
};

// Clipped n-gram matches by scanning every hypothesis position.
inline Counts ngram_counts(const Words& hyp, const Words& ref, std::size_t max_n) {
  Counts c;
  c.match.assign(max_n, 0);
  c.total.assign(max_n, 0);
  c.hyp_len = static_cast<double>(hyp.size());
  c.ref_len = static_cast<double>(ref.size());
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::set<Words> seen;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      Words gram(hyp.begin() + static_cast<long>(i), hyp.begin() + static_cast<long>(i + n));
      c.total[n - 1] += 1;
      if (!seen.insert(gram).second) continue;
      c.match[n - 1] += static_cast<double>(std::min(count_ngram(hyp, gram), count_ngram(ref, gram)));
    }
  }
  return c;
}

// Corpus BLEU: orders without hypothesis n-grams are left out of the mean.
inline double corpus_bleu(const std::vector<Words>& hyps, const std::vector<Words>& refs, std::size_t max_n = 4) {
  Counts sum;
  sum.match.assign(max_n, 0);
  sum.total.assign(max_n, 0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto c = ngram_counts(hyps[i], refs[i], max_n);
    for (std::size_t n = 0; n < max_n; ++n) {
      sum.match[n] += c.match[n];
      sum.total[n] += c.total[n];
    }
    sum.hyp_len += c.hyp_len;
    sum.ref_len += c.ref_len;
  }
  if (sum.hyp_len == 0) return 0.0;
  double product = 1.0;
  int orders = 0;
  for (std::size_t n = 0; n < max_n; ++n) {
    if (sum.total[n] == 0) continue;
    if (sum.match[n] == 0) return 0.0;
    product *= sum.match[n] / sum.total[n];
    ++orders;
  }
  const double bp = sum.hyp_len >= sum.ref_len ? 1.0 : std::exp(1.0 - sum.ref_len / sum.hyp_len);
  return 100.0 * bp * std::pow(product, 1.0 / orders);
}

// Sentence BLEU with add-one smoothing on orders two and up.
inline double sentence_bleu(const Words& hyp, const Words& ref, std::size_t max_n = 4) {
  if (hyp.empty()) return 0.0;
  const auto c = ngram_counts(hyp, ref, max_n);
  double log_sum = 0;
  for (std::size_t n = 0; n < max_n; ++n) {
    const double p = n == 0 ? c.match[0] / c.total[0] : (c.match[n] + 1) / (c.total[n] + 1);
    if (p == 0) return 0.0;
    log_sum += std::log(p);
  }
  const double bp = c.hyp_len >= c.ref_len ? 1.0 : std::exp(1.0 - c.ref_len / c.hyp_len);
  return 100.0 * bp * std::exp(log_sum / double(max_n));
}

inline std::size_t edit_distance(const Words& a, const Words& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

inline bool in_reference(const Words& ref, const Words& block) { return count_ngram(ref, block) > 0; }

// Every string reachable by moving one block that also occurs in the reference.
inline std::vector<Words> shift_neighbours(const Words& s, const Words& ref) {
  std::vector<Words> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t len = 1; i + len <= s.size(); ++len) {
      Words block(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i + len));
      if (!in_reference(ref, block)) break;
      Words rest(s.begin(), s.begin() + static_cast<long>(i));
      rest.insert(rest.end(), s.begin() + static_cast<long>(i + len), s.end());
      for (std::size_t pos = 0; pos <= rest.size(); ++pos) {
        if (pos == i) continue;
        Words moved(rest.begin(), rest.begin() + static_cast<long>(pos));
        moved.insert(moved.end(), block.begin(), block.end());
        moved.insert(moved.end(), rest.begin() + static_cast<long>(pos), rest.end());
        out.push_back(std::move(moved));
      }
    }
  }
  return out;
}

// Exact minimum of shifts + edit distance by breadth-first search over shift
// sequences, cut off once the shift count alone reaches the best total.
inline std::size_t ter_edits(const Words& hyp, const Words& ref) {
  std::size_t best = edit_distance(hyp, ref);
  std::set<Words> seen{hyp};
  std::vector<Words> frontier{hyp};
  for (std::size_t depth = 1; depth < best && !frontier.empty(); ++depth) {
    std::vector<Words> next;
    for (const auto& s : frontier) {
      for (auto& n : shift_neighbours(s, ref)) {
        if (!seen.insert(n).second) continue;
        best = std::min(best, depth + edit_distance(n, ref));
        next.push_back(std::move(n));
      }
    }
    frontier = std::move(next);
  }
  return best;
}

inline double ter(const Words& hyp, const Words& ref) {
  return static_cast<double>(ter_edits(hyp, ref)) / static_cast<double>(ref.size());
}

// Alignment EM by enumerating every assignment of target words to the null
// word or a source position. Each assignment's weight is the product of the
// per-position prior times lexical probability.
struct ToyPair {
  Words source, target;
};
using Table = std::map<std::pair<std::string, std::string>, double>;  // (source, target) -> p

inline std::vector<double> diagonal_prior(std::size_t t, std::size_t n, std::size_t m, double lambda, double p_null) {
  std::vector<double> w(n + 1);
  double z = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    w[j] = std::exp(-lambda * std::fabs(double(t) / double(m) - double(j) / double(n)));
    z += w[j];
  }
  w[0] = p_null;
  for (std::size_t j = 1; j <= n; ++j) w[j] = w[j] * (1 - p_null) / z;
  return w;
}

inline double lookup(const Table& t, const std::string& e, const std::string& f) {
  auto it = t.find({e, f});
  return it == t.end() ? 0.0 : it->second;
}

struct EmTrace {
  Table table;
  std::vector<double> log_likelihood;
};

inline EmTrace brute_force_em(const std::vector<ToyPair>& pairs, std::size_t iterations, double lambda,
                              double p_null) {
  const std::string null = "<null>";
  EmTrace out;
  std::map<std::string, std::set<std::string>> cooc;
  for (const auto& p : pairs) {
    for (const auto& f : p.target) {
      cooc[null].insert(f);
      for (const auto& e : p.source) cooc[e].insert(f);
    }
  }
  for (const auto& [e, fs] : cooc) {
    for (const auto& f : fs) out.table[{e, f}] = 1.0 / double(fs.size());
  }
  auto pass = [&](const Table& table, Table* counts) {
    double ll = 0;
    for (const auto& p : pairs) {
      const std::size_t n = p.source.size(), m = p.target.size();
      std::vector<std::size_t> a(m, 0);
      double total = 0;
      std::vector<std::pair<std::vector<std::size_t>, double>> joint;
      while (true) {
        double w = 1;
        for (std::size_t t = 0; t < m; ++t) {
          const auto prior = diagonal_prior(t + 1, n, m, lambda, p_null);
          const std::string& e = a[t] == 0 ? null : p.source[a[t] - 1];
          w *= prior[a[t]] * lookup(table, e, p.target[t]);
        }
        joint.push_back({a, w});
        total += w;
        std::size_t k = 0;
        while (k < m && ++a[k] > n) a[k++] = 0;
        if (k == m) break;
      }
      ll += std::log(total);
      if (!counts) continue;
      for (const auto& [assign, w] : joint) {
        for (std::size_t t = 0; t < m; ++t) {
          const std::string& e = assign[t] == 0 ? null : p.source[assign[t] - 1];
          (*counts)[{e, p.target[t]}] += w / total;
        }
      }
    }
    return ll;
  };
  for (std::size_t it = 0; it < iterations; ++it) {
    Table counts;
    out.log_likelihood.push_back(pass(out.table, &counts));
    std::map<std::string, double> norm;
    for (const auto& [k, c] : counts) norm[k.first] += c;
    Table next;
    for (const auto& [k, c] : counts) {
      if (c > 0) next[k] = c / norm[k.first];
    }
    out.table = std::move(next);
  }
  out.log_likelihood.push_back(pass(out.table, nullptr));
  return out;
}

}  // namespace oracle
