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

#include "simulmt/annotation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "simulmt/error.hpp"
#include "simulmt/report.hpp"

namespace simulmt::annotation {

ErrorTypology::ErrorTypology(std::vector<ErrorType> types) : types_(std::move(types)) {
  std::set<std::string> seen;
  for (const auto& t : types_) {
    if (!seen.insert(t.code).second) throw UsageError("typology: duplicate code " + t.code);
  }
  for (const auto& t : types_) {
    if (!t.parent.empty() && !seen.count(t.parent)) {
      throw UsageError("typology: " + t.code + " has unknown parent " + t.parent);
    }
  }
}

const ErrorTypology& ErrorTypology::mqm() {
  static const ErrorTypology typology({
      {"ac", "Accuracy", ""},
      {"ad", "Addition", "ac"},
      {"mt", "Mistranslation", "ac"},
      {"ne", "Non-existing word form", "ac"},
      {"om", "Omission", "ac"},
      {"ol", "Overly literal", "ac"},
      {"fl", "Fluency", ""},
      {"du", "Duplication", "fl"},
      {"gr", "Grammar", "fl"},
      {"ty", "Typography", "fl"},
      {"un", "Unintelligible", "fl"},
      {"wo", "Word order", "fl"},
      {"ot", "Other", ""},
  });
  return typology;
}

std::vector<std::string> ErrorTypology::codes() const {
  std::vector<std::string> out;
  for (const auto& t : types_) out.push_back(t.code);
  return out;
}

bool ErrorTypology::contains(std::string_view code) const {
  return std::any_of(types_.begin(), types_.end(), [&](const auto& t) { return t.code == code; });
}

const ErrorType& ErrorTypology::at(std::string_view code) const {
  for (const auto& t : types_) {
    if (t.code == code) return t;
  }
  throw UsageError("typology: unknown code " + std::string(code));
}

const std::string& ErrorTypology::branch_of(std::string_view code) const {
  const auto& t = at(code);
  return t.parent.empty() ? t.code : at(t.parent).code;
}

std::vector<std::string> report_rows(const ErrorTypology& typology) {
  std::vector<std::string> rows;
  for (const auto& branch : typology.types()) {
    if (!branch.parent.empty()) continue;
    for (const auto& t : typology.types()) {
      if (typology.branch_of(t.code) == branch.code) rows.push_back(t.code);
    }
    if (branch.code == "ac") rows.push_back(kAccuracyTotal);
    if (branch.code == "fl") rows.push_back(kFluencyTotal);
  }
  rows.push_back(kGrandTotal);
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t parse_index(const std::string& s, std::size_t lineno, const char* what) {
  try {
    std::size_t used = 0;
    if (s.empty() || s.front() == '-' || s.front() == '+') throw std::invalid_argument(s);
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw DataError("annotation line " + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
  }
}

Span parse_span(const std::string& s, std::size_t lineno, std::size_t limit, const char* side) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw DataError("annotation line " + std::to_string(lineno) + ": bad " + side + " span '" + s +
                    "', expected start:end");
  }
  Span span{parse_index(s.substr(0, colon), lineno, "span start"),
            parse_index(s.substr(colon + 1), lineno, "span end")};
  if (span.begin > span.end || span.end > limit) {
    throw DataError("annotation line " + std::to_string(lineno) + ": " + side + " span " + s +
                    " outside [0, " + std::to_string(limit) + "]");
  }
  return span;
}

}  // namespace

std::vector<ErrorAnnotation> parse_annotations(std::string_view content,
                                               const ErrorTypology& typology,
                                               const std::vector<metrics::EvalPair>& segments) {
  std::map<std::size_t, const metrics::EvalPair*> by_id;
  for (const auto& s : segments) by_id[s.id] = &s;

  std::vector<ErrorAnnotation> out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string line(content.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = report::split_tabs(line);
    if (out.empty() && f[0] == "segment_id") continue;
    if (f.size() < 4 || f.size() > 5) {
      throw DataError("annotation line " + std::to_string(lineno) + ": expected 4 or 5 tab-separated fields, got " +
                      std::to_string(f.size()));
    }
    ErrorAnnotation a;
    a.segment_id = parse_index(f[0], lineno, "segment id");
    auto it = by_id.find(a.segment_id);
    if (it == by_id.end()) {
      throw DataError("annotation line " + std::to_string(lineno) + ": unknown segment " + f[0]);
    }
    a.annotator = f[1];
    if (a.annotator.empty()) throw DataError("annotation line " + std::to_string(lineno) + ": empty annotator");
    a.code = f[2];
    if (!typology.contains(a.code)) {
      throw DataError("annotation line " + std::to_string(lineno) + ": unknown error code '" + a.code + "'");
    }
    a.target = parse_span(f[3], lineno, it->second->hypothesis.size(), "target");
    if (f.size() == 5 && !f[4].empty() && f[4] != "-") {
      a.source = parse_span(f[4], lineno, it->second->source.size(), "source");
    }
    if (a.target.empty() && (!a.source || a.source->empty())) {
      throw DataError("annotation line " + std::to_string(lineno) +
                      ": empty target span requires a non-empty source span");
    }
    out.push_back(std::move(a));
  }
  return out;
}

// ---------------------------------------------------------------------------

LabelSet TokenLabeling::union_at(std::size_t token) const {
  LabelSet out;
  for (const auto& per : target) out.insert(per.at(token).begin(), per.at(token).end());
  return out;
}

LabelSet TokenLabeling::source_union_at(std::size_t token) const {
  LabelSet out;
  for (const auto& per : source) out.insert(per.at(token).begin(), per.at(token).end());
  return out;
}

std::string TokenLabeling::category(std::size_t annotator, std::size_t token) const {
  const auto& labels = target.at(annotator).at(token);
  if (labels.empty()) return "none";
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += ',';
    out += l;
  }
  return out;
}

bool TokenLabeling::exact_agreement(std::size_t token) const {
  for (std::size_t a = 1; a < target.size(); ++a) {
    if (target[a].at(token) != target[0].at(token)) return false;
  }
  return true;
}

std::vector<std::string> annotators_of(const std::vector<ErrorAnnotation>& annotations) {
  std::set<std::string> ids;
  for (const auto& a : annotations) ids.insert(a.annotator);
  return {ids.begin(), ids.end()};
}

TokenLabeling token_labels(const std::vector<ErrorAnnotation>& annotations,
                           const metrics::EvalPair& segment, std::vector<std::string> annotators) {
  if (annotators.empty()) annotators = annotators_of(annotations);
  TokenLabeling out;
  out.segment_id = segment.id;
  out.annotators = annotators;
  out.target.assign(annotators.size(), std::vector<LabelSet>(segment.hypothesis.size()));
  out.source.assign(annotators.size(), std::vector<LabelSet>(segment.source.size()));
  for (const auto& a : annotations) {
    if (a.segment_id != segment.id) continue;
    const auto who = std::find(annotators.begin(), annotators.end(), a.annotator);
    if (who == annotators.end()) continue;
    const auto k = static_cast<std::size_t>(who - annotators.begin());
    for (std::size_t i = a.target.begin; i < std::min(a.target.end, segment.hypothesis.size()); ++i) {
      out.target[k][i].insert(a.code);
    }
    if (a.source) {
      for (std::size_t j = a.source->begin; j < std::min(a.source->end, segment.source.size()); ++j) {
        out.source[k][j].insert(a.code);
      }
    }
  }
  return out;
}

double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) throw UsageError("cohen_kappa: label lists differ in length");
  if (a.empty()) throw UsageError("cohen_kappa: no items");
  std::map<std::string, long> ca, cb;
  long agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  // kappa = (N*agree - sum ca*cb) / (N^2 - sum ca*cb), kept in integers.
  const long n = static_cast<long>(a.size());
  long chance = 0;
  for (const auto& [cat, c] : ca) {
    auto it = cb.find(cat);
    if (it != cb.end()) chance += c * it->second;
  }
  const long denom = n * n - chance;
  if (denom == 0) {
    if (agree == n) return 1.0;
    throw NumericError("cohen_kappa: chance agreement is 1 but observed agreement is not");
  }
  return static_cast<double>(n * agree - chance) / static_cast<double>(denom);
}

double cohen_kappa_tokens(const std::vector<TokenLabeling>& labelings) {
  std::vector<std::string> a, b;
  for (const auto& l : labelings) {
    if (l.annotators.size() != 2) {
      throw UsageError("cohen_kappa_tokens: segment " + std::to_string(l.segment_id) + " has " +
                       std::to_string(l.annotators.size()) + " annotators, expected 2");
    }
    for (std::size_t t = 0; t < l.size(); ++t) {
      a.push_back(l.category(0, t));
      b.push_back(l.category(1, t));
    }
  }
  if (a.empty()) throw UsageError("cohen_kappa_tokens: no tokens");
  return cohen_kappa(a, b);
}

std::vector<TypeAgreement> per_type_agreement(const std::vector<TokenLabeling>& labelings,
                                              const ErrorTypology& typology, bool chance_corrected) {
  for (const auto& l : labelings) {
    if (l.annotators.size() != 2) throw UsageError("per_type_agreement: expected two annotators");
  }
  std::vector<TypeAgreement> out;
  for (const auto& code : typology.codes()) {
    std::vector<std::string> a, b;
    for (const auto& l : labelings) {
      for (std::size_t t = 0; t < l.size(); ++t) {
        a.push_back(l.target[0][t].count(code) ? "1" : "0");
        b.push_back(l.target[1][t].count(code) ? "1" : "0");
      }
    }
    TypeAgreement ta;
    ta.code = code;
    if (a.empty()) {
      out.push_back(ta);
      continue;
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i];
    ta.proportion = static_cast<double>(agree) / static_cast<double>(a.size());
    if (chance_corrected) {
      const bool constant = std::all_of(a.begin(), a.end(), [&](const auto& v) { return v == a[0]; }) &&
                            std::all_of(b.begin(), b.end(), [&](const auto& v) { return v == a[0]; });
      if (!constant) {
        ta.kappa = cohen_kappa(a, b);
        ta.kappa_defined = true;
      }
    }
    out.push_back(ta);
  }
  return out;
}

std::vector<BucketKappa> kappa_by_bucket(const std::vector<TokenLabeling>& labelings,
                                         const std::vector<double>& values,
                                         const std::vector<double>& edges) {
  if (values.size() != labelings.size()) throw UsageError("kappa_by_bucket: one value per labeling required");
  if (edges.size() < 2) throw UsageError("kappa_by_bucket: need at least two edges");
  std::vector<std::vector<TokenLabeling>> groups(edges.size() - 1);
  for (std::size_t i = 0; i < labelings.size(); ++i) {
    if (auto b = metrics::bin_index(edges, values[i])) groups[*b].push_back(labelings[i]);
  }
  std::vector<BucketKappa> out;
  for (std::size_t b = 0; b < groups.size(); ++b) {
    BucketKappa bk{edges[b], edges[b + 1], groups[b].size(), 0, std::nullopt};
    for (const auto& l : groups[b]) bk.tokens += l.size();
    if (bk.tokens > 0) {
      try {
        bk.kappa = cohen_kappa_tokens(groups[b]);
      } catch (const NumericError&) {
      }
    }
    out.push_back(bk);
  }
  return out;
}

// ---------------------------------------------------------------------------

long CountMatrix::at(std::string_view row, std::string_view system) const {
  const auto r = std::find(rows.begin(), rows.end(), row);
  const auto s = std::find(systems.begin(), systems.end(), system);
  if (r == rows.end() || s == systems.end()) {
    throw UsageError("count matrix: no cell (" + std::string(row) + ", " + std::string(system) + ")");
  }
  return counts[static_cast<std::size_t>(r - rows.begin())][static_cast<std::size_t>(s - systems.begin())];
}

namespace {

// Per-row totals for one bag of annotations, rows as in report_rows().
std::vector<long> row_counts(const std::vector<ErrorAnnotation>& annotations,
                             const ErrorTypology& typology, const std::vector<std::string>& rows) {
  std::map<std::string, long> per;
  for (const auto& a : annotations) {
    ++per[a.code];
    const auto& branch = typology.branch_of(a.code);
    if (branch == "ac") ++per[kAccuracyTotal];
    if (branch == "fl") ++per[kFluencyTotal];
    if (branch == "ac" || branch == "fl") ++per[kGrandTotal];
  }
  std::vector<long> out;
  for (const auto& r : rows) out.push_back(per.count(r) ? per[r] : 0);
  return out;
}

}  // namespace

CountMatrix error_counts(
    const std::vector<std::pair<std::string, std::vector<ErrorAnnotation>>>& by_system,
    const ErrorTypology& typology) {
  CountMatrix m;
  m.rows = report_rows(typology);
  m.counts.assign(m.rows.size(), std::vector<long>(by_system.size(), 0));
  for (std::size_t s = 0; s < by_system.size(); ++s) {
    m.systems.push_back(by_system[s].first);
    const auto col = row_counts(by_system[s].second, typology, m.rows);
    for (std::size_t r = 0; r < m.rows.size(); ++r) m.counts[r][s] = col[r];
  }
  return m;
}

std::string_view factor_name(Factor f) {
  switch (f) {
    case Factor::source_len: return "source_len";
    case Factor::lagging_difficulty: return "LD";
    case Factor::target_rel_pos: return "target_rel_pos";
    case Factor::source_rel_pos: return "source_rel_pos";
  }
  return "";
}

Factor parse_factor(std::string_view name) {
  for (auto f : {Factor::source_len, Factor::lagging_difficulty, Factor::target_rel_pos,
                 Factor::source_rel_pos}) {
    if (factor_name(f) == name) return f;
  }
  throw UsageError("unknown factor '" + std::string(name) + "'");
}

bool is_token_level(Factor f) {
  return f == Factor::target_rel_pos || f == Factor::source_rel_pos;
}

namespace {

double segment_ld(const metrics::EvalPair& s) {
  auto it = s.factors.find("LD");
  if (it == s.factors.end()) {
    throw DataError("segment " + std::to_string(s.id) + " has no LD factor; run `factors` first");
  }
  return it->second;
}

double segment_value(const metrics::EvalPair& s, Factor f) {
  return f == Factor::source_len ? static_cast<double>(s.source.size()) : segment_ld(s);
}

}  // namespace

std::vector<double> default_edges(Factor factor, const std::vector<metrics::EvalPair>& segments,
                                  std::size_t bins) {
  if (is_token_level(factor)) return metrics::equal_width_edges(0.0, 1.0, bins);
  std::vector<double> values;
  for (const auto& s : segments) values.push_back(segment_value(s, factor));
  return metrics::quantile_edges(values, bins);
}

BucketedRates bucketed_error_rates(const std::vector<TokenLabeling>& labelings,
                                   const std::vector<metrics::EvalPair>& segments, Factor factor,
                                   const std::vector<double>& edges, const ErrorTypology& typology) {
  if (edges.size() < 2) throw UsageError("bucketed_error_rates: need at least two edges");
  std::map<std::size_t, const metrics::EvalPair*> by_id;
  for (const auto& s : segments) by_id[s.id] = &s;

  BucketedRates out;
  out.factor = factor;
  out.edges = edges;
  out.codes = typology.codes();
  const std::size_t bins = edges.size() - 1;
  out.tokens.assign(bins, 0.0);
  out.error_tokens.assign(out.codes.size(), std::vector<double>(bins, 0.0));
  std::map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < out.codes.size(); ++i) row[out.codes[i]] = i;

  auto count = [&](std::size_t bin, const LabelSet& labels) {
    out.tokens[bin] += 1.0;
    for (const auto& c : labels) {
      auto it = row.find(c);
      if (it != row.end()) out.error_tokens[it->second][bin] += 1.0;
    }
  };

  for (const auto& l : labelings) {
    auto it = by_id.find(l.segment_id);
    if (it == by_id.end()) throw DataError("no segment with id " + std::to_string(l.segment_id));
    const auto& seg = *it->second;
    switch (factor) {
      case Factor::source_len:
      case Factor::lagging_difficulty: {
        const auto bin = metrics::bin_index(edges, segment_value(seg, factor));
        if (!bin) break;
        for (std::size_t t = 0; t < l.size(); ++t) count(*bin, l.union_at(t));
        break;
      }
      case Factor::target_rel_pos: {
        const double m = static_cast<double>(l.size());
        for (std::size_t t = 0; t < l.size(); ++t) {
          if (auto bin = metrics::bin_index(edges, static_cast<double>(t + 1) / m)) count(*bin, l.union_at(t));
        }
        break;
      }
      case Factor::source_rel_pos: {
        const std::size_t n = l.source.empty() ? 0 : l.source.front().size();
        for (std::size_t j = 0; j < n; ++j) {
          const double rel = static_cast<double>(j + 1) / static_cast<double>(n);
          if (auto bin = metrics::bin_index(edges, rel)) count(*bin, l.source_union_at(j));
        }
        break;
      }
    }
  }

  out.rates.assign(out.codes.size(), std::vector<std::optional<double>>(bins));
  out.pearson.assign(out.codes.size(), std::nullopt);
  for (std::size_t c = 0; c < out.codes.size(); ++c) {
    std::vector<double> mids, rates;
    for (std::size_t b = 0; b < bins; ++b) {
      if (out.tokens[b] <= 0) continue;
      const double rate = out.error_tokens[c][b] / out.tokens[b];
      out.rates[c][b] = rate;
      mids.push_back(0.5 * (edges[b] + edges[b + 1]));
      rates.push_back(rate);
    }
    if (mids.size() >= 2) out.pearson[c] = metrics::try_pearson_r(mids, rates);
  }
  return out;
}

SegmentErrorCounts segment_error_counts(const std::vector<ErrorAnnotation>& annotations,
                                        const std::vector<std::size_t>& segment_ids,
                                        const ErrorTypology& typology) {
  SegmentErrorCounts out;
  out.rows = report_rows(typology);
  out.segment_ids = segment_ids;
  std::map<std::size_t, std::vector<ErrorAnnotation>> per_segment;
  for (const auto& a : annotations) per_segment[a.segment_id].push_back(a);
  out.counts.assign(out.rows.size(), std::vector<double>(segment_ids.size(), 0.0));
  for (std::size_t s = 0; s < segment_ids.size(); ++s) {
    const auto col = row_counts(per_segment[segment_ids[s]], typology, out.rows);
    for (std::size_t r = 0; r < out.rows.size(); ++r) out.counts[r][s] = static_cast<double>(col[r]);
  }
  return out;
}

CorrelationMatrix metric_error_correlation(const SegmentErrorCounts& counts,
                                           const std::vector<MetricColumn>& metric_columns) {
  CorrelationMatrix m;
  m.rows = counts.rows;
  for (const auto& [name, values] : metric_columns) {
    if (values.size() != counts.segment_ids.size()) {
      throw UsageError("metric_error_correlation: column " + name + " has " +
                       std::to_string(values.size()) + " values for " +
                       std::to_string(counts.segment_ids.size()) + " segments");
    }
    m.metrics.push_back(name);
  }
  m.r.assign(m.rows.size(), std::vector<std::optional<double>>(m.metrics.size()));
  if (counts.segment_ids.size() < 2) return m;
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    for (std::size_t c = 0; c < metric_columns.size(); ++c) {
      m.r[r][c] = metrics::try_pearson_r(counts.counts[r], metric_columns[c].second);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

SamplingPlan sample_segments(const std::vector<metrics::EvalPair>& segments,
                             const SamplingOptions& options) {
  if (segments.empty()) throw UsageError("sample_segments: no segments");
  if (options.bins < 1) throw UsageError("sample_segments: need at least one bin");
  SamplingPlan plan;
  std::vector<double> lengths;
  for (const auto& s : segments) lengths.push_back(static_cast<double>(s.source.size()));
  plan.q1 = metrics::quantile(lengths, 0.25);
  plan.q3 = metrics::quantile(lengths, 0.75);

  auto has_unk = [&](const metrics::Tokens& t) {
    return std::find(t.begin(), t.end(), options.unk_token) != t.end();
  };
  std::vector<std::pair<double, std::size_t>> pool;  // (LD, id)
  for (const auto& s : segments) {
    const double len = static_cast<double>(s.source.size());
    if (len < plan.q1 || len > plan.q3) continue;
    if (has_unk(s.source) || has_unk(s.reference) || has_unk(s.hypothesis)) continue;
    plan.eligible.push_back(s.id);
    pool.emplace_back(segment_ld(s), s.id);
  }
  if (options.n > pool.size()) {
    throw UsageError("sample_segments: asked for " + std::to_string(options.n) + " segments but only " +
                     std::to_string(pool.size()) + " are eligible");
  }

  std::sort(pool.begin(), pool.end());
  const std::size_t bins = options.bins, total = pool.size();
  plan.bins.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t i = b * total / bins; i < (b + 1) * total / bins; ++i) {
      plan.bins[b].push_back(pool[i].second);
    }
  }

  plan.quotas.assign(bins, options.n / bins);
  for (std::size_t r = 0; r < options.n % bins; ++r) ++plan.quotas[bins - 1 - r];
  std::size_t deficit = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (plan.quotas[b] > plan.bins[b].size()) {
      deficit += plan.quotas[b] - plan.bins[b].size();
      plan.quotas[b] = plan.bins[b].size();
    }
  }
  while (deficit > 0) {
    for (std::size_t r = 0; r < bins && deficit > 0; ++r) {
      const std::size_t b = bins - 1 - r;
      if (plan.quotas[b] < plan.bins[b].size()) {
        ++plan.quotas[b];
        --deficit;
      }
    }
  }

  std::mt19937_64 rng(options.seed);
  for (std::size_t b = 0; b < bins; ++b) {
    auto ids = plan.bins[b];
    std::shuffle(ids.begin(), ids.end(), rng);
    plan.sampled.insert(plan.sampled.end(), ids.begin(),
                        ids.begin() + static_cast<std::ptrdiff_t>(plan.quotas[b]));
  }
  std::sort(plan.sampled.begin(), plan.sampled.end());
  return plan;
}

}  // namespace simulmt::annotation
