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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simulmt/corpus.hpp"

namespace simulmt::metrics {

using corpus::Tokens;

enum class Granularity { corpus, sentence };

struct MetricScore {
  std::string metric;
  double value = 0.0;
  Granularity granularity = Granularity::corpus;
};

struct EvalPair {
  std::size_t id = 0;
  Tokens source;
  Tokens reference;
  Tokens hypothesis;
  std::map<std::string, double> factors;  // source_len, LD, length_ratio, ...
};

// ---------------------------------------------------------------------------
// BLEU

struct NgramStats {
  std::vector<double> matches;  // clipped matches per order 1..max_n
  std::vector<double> totals;   // hypothesis n-grams per order
  double hyp_len = 0;
  double ref_len = 0;

  NgramStats& operator+=(const NgramStats& other);
};

NgramStats ngram_stats(const Tokens& hypothesis, const Tokens& reference, std::size_t max_n);

/// BLEU x 100 from sufficient statistics. With `smooth`, orders n >= 2 use
/// (m + 1) / (c + 1). An empty hypothesis scores 0.
double bleu_from_stats(const NgramStats& stats, bool smooth);

MetricScore corpus_bleu(const std::vector<EvalPair>& pairs, std::size_t max_n = 4);
std::vector<MetricScore> sentence_bleu(const std::vector<EvalPair>& pairs, std::size_t max_n = 4);
/// Corpus granularity yields a single score. Throws UsageError on empty input.
std::vector<MetricScore> bleu(const std::vector<EvalPair>& pairs, std::size_t max_n,
                              Granularity granularity);

// ---------------------------------------------------------------------------
// TER

std::size_t levenshtein(const Tokens& a, const Tokens& b);

struct TerResult {
  std::size_t edits = 0;   // insertions, deletions and substitutions after shifting
  std::size_t shifts = 0;
  std::size_t ref_len = 0;
  double score() const { return static_cast<double>(edits + shifts) / static_cast<double>(ref_len); }
};

inline constexpr std::size_t kTerMaxShiftRounds = 100;
inline constexpr std::size_t kTerMaxBlock = 10;

/// Greedy shift search: each round applies the block move that lowers the
/// edit distance the most. Only hypothesis spans occurring verbatim in the
/// reference may move. Ties prefer the earliest block, then the longest, then
/// the leftmost destination. Throws UsageError on an empty reference.
TerResult ter_details(const Tokens& hypothesis, const Tokens& reference);
double ter(const Tokens& hypothesis, const Tokens& reference);

// ---------------------------------------------------------------------------
// ROUGE-L

std::size_t lcs_length(const Tokens& a, const Tokens& b);
/// LCS F-measure x 100. Empty hypothesis scores 0; empty reference throws.
double rouge_l(const Tokens& hypothesis, const Tokens& reference, double beta = 1.0);

// ---------------------------------------------------------------------------
// Corpus-level scoring and significance

/// A corpus metric decomposed into additive per-segment statistics.
struct CorpusMetric {
  std::string name;
  bool higher_is_better = true;
  std::function<std::vector<double>(const Tokens& hyp, const Tokens& ref)> segment_stats;
  std::function<double(const std::vector<double>& summed)> score;
};

CorpusMetric bleu_metric(std::size_t max_n = 4);
CorpusMetric ter_metric();
CorpusMetric rouge_l_metric(double beta = 1.0);

double corpus_score(const CorpusMetric& metric, const std::vector<Tokens>& hypotheses,
                    const std::vector<Tokens>& references);

struct BootstrapOptions {
  std::size_t sample_size = 3000;
  std::size_t resamples = 1000;
  std::uint64_t seed = 1;
};

struct BootstrapReport {
  double score_a = 0.0;
  double score_b = 0.0;
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  std::size_t ties = 0;
  std::size_t resamples = 0;

  double win_rate_a() const { return static_cast<double>(wins_a) / static_cast<double>(resamples); }
  double win_rate_b() const { return static_cast<double>(wins_b) / static_cast<double>(resamples); }
  /// 1 - win rate of the side that wins more often.
  double p_value() const;
  /// True when the better side wins in at least `level` of the resamples.
  bool significant(double level = 0.95) const;
};

/// Throws UsageError on misaligned or empty lists and on zero resamples.
BootstrapReport paired_bootstrap(const std::vector<Tokens>& system_a,
                                 const std::vector<Tokens>& system_b,
                                 const std::vector<Tokens>& references, const CorpusMetric& metric,
                                 const BootstrapOptions& options = {});

// ---------------------------------------------------------------------------
// Statistics helpers shared with the annotation analytics

/// Product-moment correlation. Throws UsageError on length mismatch or fewer
/// than two points, NumericError when either variance is zero.
double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys);
/// Same, but returns nullopt where pearson_r would throw NumericError.
std::optional<double> try_pearson_r(const std::vector<double>& xs, const std::vector<double>& ys);

/// Linear-interpolation quantile on sorted order statistics (h = (N-1)p).
double quantile(std::vector<double> values, double p);
/// bins + 1 edges at equally spaced quantiles (possibly repeated on ties).
std::vector<double> quantile_edges(const std::vector<double>& values, std::size_t bins);
std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins);
/// Bin i covers [edges[i], edges[i+1]); the last bin is closed. nullopt outside.
std::optional<std::size_t> bin_index(const std::vector<double>& edges, double value);

struct BucketScore {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::optional<double> bleu;  // absent for empty bins
};

/// Corpus BLEU of the pairs falling into each bin of `values`.
std::vector<BucketScore> bucketed_bleu(const std::vector<EvalPair>& pairs,
                                       const std::vector<double>& values,
                                       const std::vector<double>& edges, std::size_t max_n = 4);

}  // namespace simulmt::metrics
