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

#include "simulmt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "simulmt/error.hpp"

namespace simulmt::metrics {

NgramStats& NgramStats::operator+=(const NgramStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size(), 0.0);
    totals.resize(other.totals.size(), 0.0);
  }
  for (std::size_t n = 0; n < other.matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

namespace {

std::map<std::vector<std::string>, long> count_ngrams(const Tokens& tokens, std::size_t n) {
  std::map<std::vector<std::string>, long> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

NgramStats ngram_stats(const Tokens& hypothesis, const Tokens& reference, std::size_t max_n) {
  if (max_n < 1) throw UsageError("BLEU: max_n must be >= 1");
  NgramStats s;
  s.matches.assign(max_n, 0.0);
  s.totals.assign(max_n, 0.0);
  s.hyp_len = static_cast<double>(hypothesis.size());
  s.ref_len = static_cast<double>(reference.size());
  for (std::size_t n = 1; n <= max_n; ++n) {
    if (hypothesis.size() < n) break;
    s.totals[n - 1] = static_cast<double>(hypothesis.size() - n + 1);
    const auto ref_counts = count_ngrams(reference, n);
    for (const auto& [gram, c] : count_ngrams(hypothesis, n)) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) s.matches[n - 1] += static_cast<double>(std::min(c, it->second));
    }
  }
  return s;
}

double bleu_from_stats(const NgramStats& stats, bool smooth) {
  if (stats.hyp_len <= 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < stats.matches.size(); ++n) {
    double p;
    if (smooth && n >= 1) {
      p = (stats.matches[n] + 1.0) / (stats.totals[n] + 1.0);
    } else {
      // Orders the hypothesis side is too short to contain carry no evidence.
      if (stats.totals[n] <= 0) continue;
      p = stats.matches[n] / stats.totals[n];
    }
    if (p <= 0) return 0.0;
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double bp =
      stats.hyp_len < stats.ref_len ? std::exp(1.0 - stats.ref_len / stats.hyp_len) : 1.0;
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(orders));
}

MetricScore corpus_bleu(const std::vector<EvalPair>& pairs, std::size_t max_n) {
  if (pairs.empty()) throw UsageError("BLEU: no segments");
  NgramStats total;
  for (const auto& p : pairs) total += ngram_stats(p.hypothesis, p.reference, max_n);
  return {"BLEU", bleu_from_stats(total, false), Granularity::corpus};
}

std::vector<MetricScore> sentence_bleu(const std::vector<EvalPair>& pairs, std::size_t max_n) {
  if (pairs.empty()) throw UsageError("BLEU: no segments");
  std::vector<MetricScore> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({"SentBLEU", bleu_from_stats(ngram_stats(p.hypothesis, p.reference, max_n), true),
                   Granularity::sentence});
  }
  return out;
}

std::vector<MetricScore> bleu(const std::vector<EvalPair>& pairs, std::size_t max_n,
                              Granularity granularity) {
  if (granularity == Granularity::corpus) return {corpus_bleu(pairs, max_n)};
  return sentence_bleu(pairs, max_n);
}

// ---------------------------------------------------------------------------

std::size_t levenshtein(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

bool occurs_in(const Tokens& haystack, const Tokens& seq, std::size_t from, std::size_t len) {
  if (len > haystack.size()) return false;
  for (std::size_t s = 0; s + len <= haystack.size(); ++s) {
    if (std::equal(seq.begin() + static_cast<std::ptrdiff_t>(from),
                   seq.begin() + static_cast<std::ptrdiff_t>(from + len),
                   haystack.begin() + static_cast<std::ptrdiff_t>(s))) {
      return true;
    }
  }
  return false;
}

Tokens move_block(const Tokens& seq, std::size_t from, std::size_t len, std::size_t dest) {
  Tokens rest;
  rest.reserve(seq.size());
  rest.insert(rest.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(from));
  rest.insert(rest.end(), seq.begin() + static_cast<std::ptrdiff_t>(from + len), seq.end());
  Tokens out(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(dest));
  out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(from),
             seq.begin() + static_cast<std::ptrdiff_t>(from + len));
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(dest), rest.end());
  return out;
}

}  // namespace

TerResult ter_details(const Tokens& hypothesis, const Tokens& reference) {
  if (reference.empty()) throw UsageError("TER: empty reference");
  TerResult r;
  r.ref_len = reference.size();
  Tokens cur = hypothesis;
  std::size_t dist = levenshtein(cur, reference);
  for (std::size_t round = 0; round < kTerMaxShiftRounds && dist > 0; ++round) {
    std::size_t best_gain = 0, best_from = 0, best_len = 0, best_dest = 0;
    for (std::size_t from = 0; from < cur.size(); ++from) {
      for (std::size_t len = 1; len <= kTerMaxBlock && from + len <= cur.size(); ++len) {
        if (!occurs_in(reference, cur, from, len)) break;
        for (std::size_t dest = 0; dest + len <= cur.size(); ++dest) {
          if (dest == from) continue;
          const std::size_t d = levenshtein(move_block(cur, from, len, dest), reference);
          if (d >= dist) continue;
          const std::size_t gain = dist - d;
          // Strictly larger gain wins; on equal gain the longer block from the
          // same start wins (earlier starts and destinations were seen first).
          if (gain > best_gain || (gain == best_gain && from == best_from && len > best_len)) {
            best_gain = gain;
            best_from = from;
            best_len = len;
            best_dest = dest;
          }
        }
      }
    }
    if (best_gain == 0) break;
    cur = move_block(cur, best_from, best_len, best_dest);
    dist -= best_gain;
    ++r.shifts;
  }
  r.edits = dist;
  return r;
}

double ter(const Tokens& hypothesis, const Tokens& reference) {
  return ter_details(hypothesis, reference).score();
}

// ---------------------------------------------------------------------------

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const Tokens& hypothesis, const Tokens& reference, double beta) {
  if (reference.empty()) throw UsageError("ROUGE-L: empty reference");
  if (hypothesis.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(hypothesis, reference));
  if (lcs == 0) return 0.0;
  const double p = lcs / static_cast<double>(hypothesis.size());
  const double r = lcs / static_cast<double>(reference.size());
  const double b2 = beta * beta;
  return 100.0 * (1 + b2) * p * r / (r + b2 * p);
}

// ---------------------------------------------------------------------------

CorpusMetric bleu_metric(std::size_t max_n) {
  CorpusMetric m;
  m.name = "BLEU";
  m.segment_stats = [max_n](const Tokens& hyp, const Tokens& ref) {
    auto s = ngram_stats(hyp, ref, max_n);
    std::vector<double> v = s.matches;
    v.insert(v.end(), s.totals.begin(), s.totals.end());
    v.push_back(s.hyp_len);
    v.push_back(s.ref_len);
    return v;
  };
  m.score = [max_n](const std::vector<double>& v) {
    NgramStats s;
    s.matches.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(max_n));
    s.totals.assign(v.begin() + static_cast<std::ptrdiff_t>(max_n),
                    v.begin() + static_cast<std::ptrdiff_t>(2 * max_n));
    s.hyp_len = v[2 * max_n];
    s.ref_len = v[2 * max_n + 1];
    return bleu_from_stats(s, false);
  };
  return m;
}

CorpusMetric ter_metric() {
  CorpusMetric m;
  m.name = "TER";
  m.higher_is_better = false;
  m.segment_stats = [](const Tokens& hyp, const Tokens& ref) {
    auto r = ter_details(hyp, ref);
    return std::vector<double>{static_cast<double>(r.edits + r.shifts), static_cast<double>(r.ref_len)};
  };
  m.score = [](const std::vector<double>& v) { return v[0] / v[1]; };
  return m;
}

CorpusMetric rouge_l_metric(double beta) {
  CorpusMetric m;
  m.name = "ROUGE-L";
  m.segment_stats = [beta](const Tokens& hyp, const Tokens& ref) {
    return std::vector<double>{rouge_l(hyp, ref, beta), 1.0};
  };
  m.score = [](const std::vector<double>& v) { return v[0] / v[1]; };
  return m;
}

namespace {

std::vector<std::vector<double>> all_stats(const CorpusMetric& metric,
                                           const std::vector<Tokens>& hyps,
                                           const std::vector<Tokens>& refs) {
  std::vector<std::vector<double>> out;
  out.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) out.push_back(metric.segment_stats(hyps[i], refs[i]));
  return out;
}

void accumulate(std::vector<double>& into, const std::vector<double>& v) {
  if (into.empty()) into.assign(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) into[i] += v[i];
}

}  // namespace

double corpus_score(const CorpusMetric& metric, const std::vector<Tokens>& hypotheses,
                    const std::vector<Tokens>& references) {
  if (hypotheses.size() != references.size()) {
    throw UsageError(metric.name + ": " + std::to_string(hypotheses.size()) + " hypotheses for " +
                     std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw UsageError(metric.name + ": no segments");
  std::vector<double> sum;
  for (const auto& s : all_stats(metric, hypotheses, references)) accumulate(sum, s);
  return metric.score(sum);
}

double BootstrapReport::p_value() const {
  return 1.0 - std::max(win_rate_a(), win_rate_b());
}

bool BootstrapReport::significant(double level) const {
  return std::max(win_rate_a(), win_rate_b()) >= level;
}

BootstrapReport paired_bootstrap(const std::vector<Tokens>& system_a,
                                 const std::vector<Tokens>& system_b,
                                 const std::vector<Tokens>& references, const CorpusMetric& metric,
                                 const BootstrapOptions& options) {
  if (system_a.size() != references.size() || system_b.size() != references.size()) {
    throw UsageError("paired_bootstrap: system and reference lists are misaligned");
  }
  if (references.empty()) throw UsageError("paired_bootstrap: no segments");
  if (options.resamples < 1) throw UsageError("paired_bootstrap: resamples must be >= 1");
  if (options.sample_size < 1) throw UsageError("paired_bootstrap: sample_size must be >= 1");

  const auto stats_a = all_stats(metric, system_a, references);
  const auto stats_b = all_stats(metric, system_b, references);

  BootstrapReport rep;
  rep.resamples = options.resamples;
  {
    std::vector<double> sa, sb;
    for (std::size_t i = 0; i < references.size(); ++i) {
      accumulate(sa, stats_a[i]);
      accumulate(sb, stats_b[i]);
    }
    rep.score_a = metric.score(sa);
    rep.score_b = metric.score(sb);
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, references.size() - 1);
  std::vector<double> sa, sb;
  for (std::size_t r = 0; r < options.resamples; ++r) {
    sa.clear();
    sb.clear();
    for (std::size_t s = 0; s < options.sample_size; ++s) {
      const std::size_t i = pick(rng);
      accumulate(sa, stats_a[i]);
      accumulate(sb, stats_b[i]);
    }
    const double a = metric.score(sa), b = metric.score(sb);
    if (a == b) {
      ++rep.ties;
    } else if ((a > b) == metric.higher_is_better) {
      ++rep.wins_a;
    } else {
      ++rep.wins_b;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw UsageError("pearson_r: length mismatch");
  if (xs.size() < 2) throw UsageError("pearson_r: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw NumericError("pearson_r: zero variance, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> try_pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  try {
    return pearson_r(xs, ys);
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw UsageError("quantile: no values");
  if (!(p >= 0 && p <= 1)) throw UsageError("quantile: p must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<double> quantile_edges(const std::vector<double>& values, std::size_t bins) {
  if (bins < 1) throw UsageError("quantile_edges: need at least one bin");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = quantile(values, static_cast<double>(i) / static_cast<double>(bins));
  }
  return edges;
}

std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins) {
  if (bins < 1) throw UsageError("equal_width_edges: need at least one bin");
  if (!(hi > lo)) throw UsageError("equal_width_edges: empty range");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges.back() = hi;
  return edges;
}

std::optional<std::size_t> bin_index(const std::vector<double>& edges, double value) {
  if (edges.size() < 2 || std::isnan(value)) return std::nullopt;
  if (value < edges.front() || value > edges.back()) return std::nullopt;
  const std::size_t bins = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  const auto i = static_cast<std::size_t>(it - edges.begin());
  return std::min(i - 1, bins - 1);
}

std::vector<BucketScore> bucketed_bleu(const std::vector<EvalPair>& pairs,
                                       const std::vector<double>& values,
                                       const std::vector<double>& edges, std::size_t max_n) {
  if (pairs.size() != values.size()) throw UsageError("bucketed_bleu: one value per pair required");
  if (edges.size() < 2) throw UsageError("bucketed_bleu: need at least two edges");
  const std::size_t bins = edges.size() - 1;
  std::vector<std::vector<EvalPair>> groups(bins);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (auto b = bin_index(edges, values[i])) groups[*b].push_back(pairs[i]);
  }
  std::vector<BucketScore> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = edges[b];
    out[b].hi = edges[b + 1];
    out[b].count = groups[b].size();
    if (!groups[b].empty()) out[b].bleu = corpus_bleu(groups[b], max_n).value;
  }
  return out;
}

}  // namespace simulmt::metrics
