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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simulmt/metrics.hpp"

namespace simulmt::annotation {

// ---------------------------------------------------------------------------
// Typology

struct ErrorType {
  std::string code;
  std::string name;
  std::string parent;  // empty for the three branches
};

/// MQM-derived tree with three branches (accuracy, fluency, other). The branch
/// codes "ac" and "fl" are themselves annotatable residual categories.
class ErrorTypology {
 public:
  explicit ErrorTypology(std::vector<ErrorType> types);
  static const ErrorTypology& mqm();

  const std::vector<ErrorType>& types() const { return types_; }
  std::vector<std::string> codes() const;
  bool contains(std::string_view code) const;
  const ErrorType& at(std::string_view code) const;
  /// Branch code a type rolls up into ("ac", "fl" or "ot").
  const std::string& branch_of(std::string_view code) const;

 private:
  std::vector<ErrorType> types_;
};

inline constexpr const char* kAccuracyTotal = "ac+";
inline constexpr const char* kFluencyTotal = "fl+";
inline constexpr const char* kGrandTotal = "ac+fl";

/// Report row order: the accuracy block and its total, the fluency block and
/// its total, the "other" type, then the grand total.
std::vector<std::string> report_rows(const ErrorTypology& typology);

// ---------------------------------------------------------------------------
// Annotations

/// Half-open token range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const { return begin == end; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct ErrorAnnotation {
  std::size_t segment_id = 0;
  std::string annotator;
  std::string code;
  Span target;                 // over hypothesis tokens
  std::optional<Span> source;  // over source tokens
};

/// Parses annotation TSV:
///   segment_id <TAB> annotator <TAB> code <TAB> start:end [<TAB> start:end]
/// Spans are 0-based half-open; the second one is on the source side and may
/// be omitted or written as "-". Blank lines, '#' lines and a leading header
/// row starting with "segment_id" are skipped. Throws DataError naming the line.
std::vector<ErrorAnnotation> parse_annotations(std::string_view content,
                                               const ErrorTypology& typology,
                                               const std::vector<metrics::EvalPair>& segments);

// ---------------------------------------------------------------------------
// Token labels and agreement

using LabelSet = std::set<std::string>;

struct TokenLabeling {
  std::size_t segment_id = 0;
  std::vector<std::string> annotators;
  std::vector<std::vector<LabelSet>> target;  // [annotator][hypothesis token]
  std::vector<std::vector<LabelSet>> source;  // [annotator][source token]

  std::size_t size() const { return target.empty() ? 0 : target.front().size(); }
  LabelSet union_at(std::size_t token) const;
  LabelSet source_union_at(std::size_t token) const;
  /// Sorted, comma-joined label set, or "none".
  std::string category(std::size_t annotator, std::size_t token) const;
  bool exact_agreement(std::size_t token) const;
};

/// Labels each token of the segment's hypothesis (and source) with the codes
/// of the spans covering it, per annotator. When `annotators` is empty the
/// sorted annotator ids found in `annotations` are used.
TokenLabeling token_labels(const std::vector<ErrorAnnotation>& annotations,
                           const metrics::EvalPair& segment,
                           std::vector<std::string> annotators = {});

/// Sorted ids of every annotator appearing in the annotations.
std::vector<std::string> annotators_of(const std::vector<ErrorAnnotation>& annotations);

/// Cohen's kappa over paired categorical labels. When chance agreement is 1
/// the result is 1 if observed agreement is also 1; otherwise NumericError.
double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Token-level exact-type kappa over all tokens of all labelings. Each
/// labeling must carry exactly two annotators. Throws UsageError otherwise or
/// when there are no tokens.
double cohen_kappa_tokens(const std::vector<TokenLabeling>& labelings);

struct TypeAgreement {
  std::string code;
  double proportion = 0.0;
  double kappa = 0.0;
  bool kappa_defined = false;  // false: no chance correction possible, kappa reported as 0
};

/// Binary has-type agreement per typology entry.
std::vector<TypeAgreement> per_type_agreement(const std::vector<TokenLabeling>& labelings,
                                              const ErrorTypology& typology, bool chance_corrected);

struct BucketKappa {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t segments = 0;
  std::size_t tokens = 0;
  std::optional<double> kappa;
};

/// Token-level kappa of the labelings falling into each bin of `values`.
std::vector<BucketKappa> kappa_by_bucket(const std::vector<TokenLabeling>& labelings,
                                         const std::vector<double>& values,
                                         const std::vector<double>& edges);

// ---------------------------------------------------------------------------
// Aggregation

struct CountMatrix {
  std::vector<std::string> systems;
  std::vector<std::string> rows;
  std::vector<std::vector<long>> counts;  // [row][system]

  long at(std::string_view row, std::string_view system) const;
};

/// Occurrence counts per type and system, summed over annotators, plus the
/// accuracy and fluency totals. The grand total is their sum; "other" stays
/// out of it.
CountMatrix error_counts(
    const std::vector<std::pair<std::string, std::vector<ErrorAnnotation>>>& by_system,
    const ErrorTypology& typology);

enum class Factor { source_len, lagging_difficulty, target_rel_pos, source_rel_pos };

std::string_view factor_name(Factor f);
Factor parse_factor(std::string_view name);
bool is_token_level(Factor f);

struct BucketedRates {
  Factor factor = Factor::source_len;
  std::vector<double> edges;
  std::vector<std::string> codes;
  std::vector<double> tokens;                                // per bin
  std::vector<std::vector<double>> error_tokens;             // [code][bin]
  std::vector<std::vector<std::optional<double>>> rates;     // [code][bin], absent when bin empty
  std::vector<std::optional<double>> pearson;                // per code, rate vs bin midpoint
};

/// Default edges: quantile bins for segment-level factors, equal-width bins
/// over [0, 1] for relative positions.
std::vector<double> default_edges(Factor factor, const std::vector<metrics::EvalPair>& segments,
                                  std::size_t bins);

/// Segment-level factors (source length, LD) bin whole segments by their
/// value; relative-position factors bin individual tokens at t/|y| (target)
/// or j/|x| (source). Each cell is the number of union-labeled tokens carrying
/// the code divided by all tokens in the bin. Segments are matched to
/// labelings by id; LD is read from the "LD" factor of each segment.
BucketedRates bucketed_error_rates(const std::vector<TokenLabeling>& labelings,
                                   const std::vector<metrics::EvalPair>& segments, Factor factor,
                                   const std::vector<double>& edges, const ErrorTypology& typology);

struct SegmentErrorCounts {
  std::vector<std::string> rows;          // report_rows()
  std::vector<std::size_t> segment_ids;
  std::vector<std::vector<double>> counts;  // [row][segment]
};

SegmentErrorCounts segment_error_counts(const std::vector<ErrorAnnotation>& annotations,
                                        const std::vector<std::size_t>& segment_ids,
                                        const ErrorTypology& typology);

struct CorrelationMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> metrics;
  std::vector<std::vector<std::optional<double>>> r;  // [row][metric], nullopt = undefined
};

using MetricColumn = std::pair<std::string, std::vector<double>>;

/// Pearson r of each count row against each per-segment metric column.
CorrelationMatrix metric_error_correlation(const SegmentErrorCounts& counts,
                                           const std::vector<MetricColumn>& metric_columns);

// ---------------------------------------------------------------------------
// Sampling

struct SamplingOptions {
  std::size_t n = 200;
  std::string unk_token = "<unk>";
  std::size_t bins = 6;
  std::uint64_t seed = 1;
};

struct SamplingPlan {
  double q1 = 0.0;
  double q3 = 0.0;
  std::vector<std::size_t> eligible;             // ids, input order
  std::vector<std::vector<std::size_t>> bins;    // ids by ascending LD
  std::vector<std::size_t> quotas;
  std::vector<std::size_t> sampled;              // sorted ids
};

/// Keeps segments whose source length lies in [Q1, Q3], drops those with the
/// unknown token on any side, splits the rest into equal-count LD bins and
/// draws evenly from them (remainder to the hardest bins). Throws UsageError
/// when n exceeds the eligible pool.
SamplingPlan sample_segments(const std::vector<metrics::EvalPair>& segments,
                             const SamplingOptions& options);

}  // namespace simulmt::annotation
