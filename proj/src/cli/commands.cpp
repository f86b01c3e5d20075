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

#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "simulmt/align.hpp"
#include "simulmt/annotation.hpp"
#include "simulmt/corpus.hpp"
#include "simulmt/error.hpp"
#include "simulmt/latency.hpp"
#include "simulmt/metrics.hpp"
#include "simulmt/models/model.hpp"
#include "simulmt/report.hpp"

namespace simulmt::cli {

namespace fs = std::filesystem;
using corpus::Tokens;
using report::format_real;

namespace {

void need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required option ") + flag);
}

void need_file(const std::string& path, const char* flag) {
  need(path, flag);
  if (!fs::is_regular_file(path)) throw DataError(std::string(flag) + ": no such file " + path);
}

fs::path prepare_output(const std::string& path, const char* flag) {
  need(path, flag);
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : "NA"; }

// Hypotheses read either from plain text or from a decode report.
struct HypothesisFile {
  std::vector<Tokens> lines;
  std::vector<double> confidence;  // empty for plain text
};

HypothesisFile read_hypotheses(const std::string& path) {
  need_file(path, "hypothesis file");
  bool is_report = false;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '#') continue;
      is_report = line.rfind("id\thypothesis", 0) == 0;
      break;
    }
  }
  HypothesisFile h;
  if (!is_report) {
    h.lines = corpus::read_lines(path);
    return h;
  }
  const auto t = report::read_tsv(path);
  const auto id = t.column("id"), text = t.column("hypothesis"), conf = t.column("mean_logprob");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.to_size(r, id) != r) throw DataError(path + ": ids must run 0, 1, 2, ... in order");
    h.lines.push_back(corpus::split_tokens(t.rows[r][text]));
    h.confidence.push_back(t.to_real(r, conf));
  }
  return h;
}

// Segments with the factor map filled from whatever inputs are present.
std::vector<metrics::EvalPair> build_segments(const std::string& src, const std::string& ref,
                                              const HypothesisFile& hyp, const std::string& factors) {
  need_file(ref, "--ref");
  const auto refs = corpus::read_lines(ref);
  if (refs.size() != hyp.lines.size()) {
    throw DataError("reference has " + std::to_string(refs.size()) + " lines but the hypotheses have " +
                    std::to_string(hyp.lines.size()));
  }
  std::vector<Tokens> sources;
  if (!src.empty()) {
    need_file(src, "--src");
    sources = corpus::read_lines(src);
    if (sources.size() != refs.size()) throw DataError("source and reference differ in line count");
  }
  std::vector<latency::SegmentFactors> rows;
  if (!factors.empty()) {
    need_file(factors, "--factors");
    rows = latency::read_factors(factors);
    if (rows.size() != refs.size()) throw DataError("factor file and reference differ in segment count");
  }
  std::vector<metrics::EvalPair> out(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto& s = out[i];
    s.id = i;
    s.reference = refs[i];
    s.hypothesis = hyp.lines[i];
    if (!sources.empty()) s.source = sources[i];
    s.factors["source_len"] = static_cast<double>(sources.empty() ? 0 : s.source.size());
    s.factors["length_ratio"] =
        refs[i].empty() ? 0.0 : static_cast<double>(s.hypothesis.size()) / static_cast<double>(refs[i].size());
    if (!rows.empty()) {
      if (rows[i].id != i) throw DataError(factors + ": ids must run 0, 1, 2, ... in order");
      if (!sources.empty() && rows[i].source_len != s.source.size()) {
        throw DataError(factors + ": segment " + std::to_string(i) + " source length disagrees with --src");
      }
      s.factors["LD"] = rows[i].ld;
    }
    if (!hyp.confidence.empty()) s.factors["confidence"] = hyp.confidence[i];
  }
  return out;
}

metrics::CorpusMetric metric_by_name(const std::string& name, std::size_t max_n) {
  if (name == "bleu" || name == "BLEU") return metrics::bleu_metric(max_n);
  if (name == "ter" || name == "TER") return metrics::ter_metric();
  if (name == "rouge-l" || name == "ROUGE-L" || name == "rouge_l") return metrics::rouge_l_metric();
  throw UsageError("unknown metric '" + name + "' (expected bleu, ter or rouge-l)");
}

std::vector<std::size_t> read_sample_ids(const std::string& path) {
  need_file(path, "--sample");
  const auto t = report::read_tsv(path);
  const auto col = t.column("id");
  std::vector<std::size_t> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) ids.push_back(t.to_size(r, col));
  return ids;
}

void write_table(const fs::path& path, const Options& o, const std::vector<std::string>& extra_meta,
                 const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  auto meta = provenance(o);
  meta.insert(meta.end(), extra_meta.begin(), extra_meta.end());
  report::write_tsv(path, meta, header, rows);
}

}  // namespace

std::vector<std::string> provenance(const Options& o) {
  return {"tool=" + std::string(report::kToolVersion), "seed=" + (o.seed ? std::to_string(*o.seed) : "none"),
          "config=" + o.config_hash};
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw UsageError(o.command + " is stochastic; pass --seed or set \"seed\" in the config");
  return *o.seed;
}

// ---------------------------------------------------------------------------

void cmd_bpe(const Options& o) {
  if (o.inputs.empty()) throw UsageError("missing required option --input");
  for (const auto& f : o.inputs) need_file(f, "--input");
  if (o.bpe_mode == "learn") {
    std::vector<Tokens> lines;
    for (const auto& f : o.inputs) {
      auto part = corpus::read_lines(f);
      lines.insert(lines.end(), part.begin(), part.end());
    }
    const auto table = corpus::bpe_learn(lines, o.merges);
    table.save(prepare_output(o.codes.empty() ? o.output : o.codes, "--codes"));
    spdlog::info("bpe: learned {} merges", table.size());
    return;
  }
  need_file(o.codes, "--codes");
  if (o.inputs.size() != 1) throw UsageError("bpe apply takes exactly one --input");
  const auto table = corpus::MergeTable::load(fs::path(o.codes));
  auto lines = corpus::read_lines(o.inputs.front());
  for (auto& l : lines) l = corpus::bpe_apply_sentence(table, l);
  corpus::write_lines(prepare_output(o.output, "--output"), lines);
}

void cmd_filter(const Options& o) {
  need_file(o.src, "--src");
  need_file(o.tgt, "--tgt");
  const auto pairs = corpus::read_parallel(o.src, o.tgt);
  const auto kept = corpus::filter_pairs(pairs, o.max_len, o.max_ratio);
  std::vector<Tokens> src, tgt;
  for (const auto& p : kept) {
    src.push_back(p.source);
    tgt.push_back(p.target);
  }
  corpus::write_lines(prepare_output(o.out_src, "--out-src"), src);
  corpus::write_lines(prepare_output(o.out_tgt, "--out-tgt"), tgt);
  spdlog::info("filter: kept {} of {} pairs", kept.size(), pairs.size());
}

void cmd_align(const Options& o) {
  need_file(o.src, "--src");
  need_file(o.tgt, "--tgt");
  const auto pairs = corpus::read_parallel(o.src, o.tgt);
  align::AlignerOptions opts;
  opts.lambda = o.lambda;
  opts.p_null = o.p_null;
  const auto em = align::em_align(pairs, o.iterations, opts);
  std::vector<align::AlignmentSet> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(align::viterbi_align(p, em.table, opts));
  align::write_pharaoh(prepare_output(o.output, "--output"), out);
  spdlog::info("align: log-likelihood {} -> {}", em.log_likelihood.front(), em.log_likelihood.back());
}

void cmd_factors(const Options& o) {
  need_file(o.src, "--src");
  need_file(o.tgt, "--tgt");
  need_file(o.alignment, "--alignment");
  if (o.k_eval == 0) throw UsageError("--k-eval must be positive");
  const auto pairs = corpus::read_parallel(o.src, o.tgt);
  const auto alignments = align::read_pharaoh(o.alignment, pairs);
  std::vector<latency::SegmentFactors> rows;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (p.source.empty() || p.target.empty()) {
      throw DataError("factors: segment " + std::to_string(i) + " has an empty side");
    }
    latency::SegmentFactors f;
    f.id = i;
    f.source_len = p.source.size();
    f.target_len = p.target.size();
    f.ld = latency::lagging_difficulty(p, alignments[i]);
    f.al = latency::average_lagging(latency::waitk_path(o.k_eval, f.source_len, f.target_len)).al;
    rows.push_back(f);
  }
  auto meta = provenance(o);
  meta.push_back("k_eval=" + std::to_string(o.k_eval));
  latency::write_factors(prepare_output(o.output, "--output"), rows, meta);
}

void cmd_train(const Options& o) {
  const auto seed = require_seed(o);
  need_file(o.src, "--src");
  need_file(o.tgt, "--tgt");
  const auto ckpt = prepare_output(o.checkpoint, "--checkpoint");
  const auto pairs = corpus::read_parallel(o.src, o.tgt);
  const auto vocab = models::Vocabulary::build(pairs);
  auto config = models::ModelConfig::tiny(models::parse_architecture(o.arch), models::parse_mode(o.model_mode),
                                          vocab.size());
  config.embed_dim = o.embed_dim;
  if (o.layers > 0) config.layer_count = o.layers;
  config.heads = o.heads;
  config.ffn_dim = o.ffn_dim;
  config.filter_width = o.filter_width;
  config.max_positions = o.max_positions;
  auto params = models::init_params(config, vocab, seed);

  models::TrainOptions t;
  t.k_train = config.mode == models::Mode::online ? o.k_train : models::kWaitInfinity;
  t.epochs = o.epochs;
  t.learning_rate = o.learning_rate;
  t.batch_size = o.batch_size;
  t.seed = seed;
  t.clip_norm = o.clip_norm;
  t.optimizer = models::parse_optimizer(o.optimizer);
  const auto result = models::train(std::move(params), models::encode_pairs(vocab, pairs), t);
  models::save_checkpoint(result.params, ckpt);
  spdlog::info("train: final epoch loss {}", result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back());

  if (!o.output.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
      rows.push_back({std::to_string(e + 1), format_real(result.epoch_loss[e])});
    }
    write_table(prepare_output(o.output, "--output"), o,
                {"architecture=" + std::string(models::to_string(config.architecture)),
                 "mode=" + std::string(models::to_string(config.mode)), "k_train=" + std::to_string(t.k_train)},
                {"epoch", "loss"}, rows);
  }
}

void cmd_decode(const Options& o) {
  need_file(o.checkpoint, "--checkpoint");
  need_file(o.src, "--src");
  const auto params = models::load_checkpoint(o.checkpoint);
  const auto sources = corpus::read_lines(o.src);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].empty()) throw DataError(o.src + ": line " + std::to_string(i + 1) + " is empty");
    const auto ids = params.vocab.encode(sources[i]);
    const std::size_t max_len = o.decode_max_len > 0 ? o.decode_max_len : 2 * ids.size() + 10;
    const auto hyp = o.decode_mode == "offline" ? models::greedy_decode(params, ids, max_len)
                                                : models::waitk_decode(params, ids, o.k_eval, max_len);
    auto tokens = hyp.tokens;
    if (!tokens.empty() && tokens.back() == models::Vocabulary::kEos) tokens.pop_back();
    const auto text = corpus::join_tokens(corpus::bpe_restore(params.vocab.decode(tokens)));
    const double al = latency::average_lagging(hyp.path).al;
    const double mean = hyp.log_prob / static_cast<double>(hyp.tokens.size());
    rows.push_back({std::to_string(i), text, format_real(al), format_real(mean), format_real(hyp.log_prob)});
  }
  write_table(prepare_output(o.output, "--output"), o, {}, {"id", "hypothesis", "AL", "mean_logprob", "sum_logprob"},
              rows);
}

void cmd_score(const Options& o) {
  const auto hyp = read_hypotheses(o.hyp);
  const auto segments = build_segments(o.src, o.ref, hyp, o.factors);
  std::vector<Tokens> hyps, refs;
  for (const auto& s : segments) {
    hyps.push_back(s.hypothesis);
    refs.push_back(s.reference);
  }
  std::vector<metrics::CorpusMetric> ms;
  for (const auto& name : o.metrics) ms.push_back(metric_by_name(name, o.max_n));

  std::vector<std::vector<std::string>> rows;
  for (const auto& m : ms) rows.push_back({"corpus", m.name, "-", format_real(metrics::corpus_score(m, hyps, refs))});

  if (!o.baseline.empty()) {
    const auto base = read_hypotheses(o.baseline);
    if (base.lines.size() != hyps.size()) throw DataError("--baseline and --hyp differ in line count");
    metrics::BootstrapOptions bo;
    bo.sample_size = o.sample_size;
    bo.resamples = o.resamples;
    bo.seed = require_seed(o);
    for (const auto& m : ms) {
      const auto r = metrics::paired_bootstrap(hyps, base.lines, refs, m, bo);
      rows.push_back({"baseline", m.name, "-", format_real(r.score_b)});
      rows.push_back({"bootstrap", m.name, "wins_system", std::to_string(r.wins_a)});
      rows.push_back({"bootstrap", m.name, "wins_baseline", std::to_string(r.wins_b)});
      rows.push_back({"bootstrap", m.name, "ties", std::to_string(r.ties)});
      rows.push_back({"bootstrap", m.name, "p_value", format_real(r.p_value())});
      rows.push_back({"bootstrap", m.name, "significant", r.significant(o.significance) ? "1" : "0"});
    }
  }

  auto bucket_by = o.bucket_by;
  if (bucket_by.empty() && !o.src.empty()) bucket_by.push_back("source_len");
  for (const auto& factor : bucket_by) {
    if (factor != "source_len" && factor != "LD") throw UsageError("--bucket-by takes source_len or LD");
    if (factor == "source_len" && o.src.empty()) throw UsageError("bucketing by source_len needs --src");
    if (factor == "LD" && o.factors.empty()) throw UsageError("bucketing by LD needs --factors");
    std::vector<double> values;
    for (const auto& s : segments) values.push_back(s.factors.at(factor));
    const auto edges = metrics::quantile_edges(values, o.bins);
    const auto buckets = metrics::bucketed_bleu(segments, values, edges, o.max_n);
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      rows.push_back({"bucket:" + factor, "BLEU",
                      "bin=" + std::to_string(b) + " lo=" + format_real(buckets[b].lo) + " hi=" +
                          format_real(buckets[b].hi) + " n=" + std::to_string(buckets[b].count),
                      optional_real(buckets[b].bleu)});
    }
  }
  write_table(prepare_output(o.output, "--output"), o, {}, {"section", "metric", "key", "value"}, rows);
}

void cmd_annotate_stats(const Options& o) {
  const auto& typology = annotation::ErrorTypology::mqm();
  if (o.hyps.empty()) throw UsageError("missing required option --hyps");
  if (o.annotations.size() != o.hyps.size()) throw UsageError("--annotations needs one file per --hyps entry");
  auto systems = o.systems;
  if (systems.empty()) {
    for (const auto& h : o.hyps) systems.push_back(fs::path(h).stem().string());
  }
  if (systems.size() != o.hyps.size()) throw UsageError("--systems needs one name per --hyps entry");
  need(o.output_dir, "--output-dir");
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);

  std::vector<std::pair<std::string, std::vector<annotation::ErrorAnnotation>>> by_system;
  std::vector<std::vector<std::string>> agreement_rows, rate_rows, trend_rows, corr_rows;

  for (std::size_t s = 0; s < systems.size(); ++s) {
    const auto hyp = read_hypotheses(o.hyps[s]);
    const auto segments = build_segments(o.src, o.ref, hyp, o.factors);
    need_file(o.annotations[s], "--annotations");
    auto annots = annotation::parse_annotations(read_file(o.annotations[s]), typology, segments);

    std::vector<std::size_t> ids;
    if (!o.sample.empty()) {
      ids = read_sample_ids(o.sample);
      for (auto id : ids) {
        if (id >= segments.size()) throw DataError("--sample id " + std::to_string(id) + " out of range");
      }
    } else {
      for (const auto& seg : segments) ids.push_back(seg.id);
    }
    const std::set<std::size_t> keep(ids.begin(), ids.end());
    std::erase_if(annots, [&](const auto& a) { return !keep.count(a.segment_id); });
    by_system.emplace_back(systems[s], annots);

    std::vector<metrics::EvalPair> chosen;
    for (auto id : ids) chosen.push_back(segments[id]);
    const auto annotators = annotation::annotators_of(annots);
    std::vector<annotation::TokenLabeling> labelings;
    for (const auto& seg : chosen) labelings.push_back(annotation::token_labels(annots, seg, annotators));

    // Agreement.
    if (annotators.size() == 2) {
      std::size_t tokens = 0, exact = 0;
      for (const auto& l : labelings) {
        for (std::size_t t = 0; t < l.size(); ++t) {
          ++tokens;
          exact += l.exact_agreement(t);
        }
      }
      std::optional<double> kappa;
      if (tokens > 0) {
        try {
          kappa = annotation::cohen_kappa_tokens(labelings);
        } catch (const NumericError&) {
        }
      }
      agreement_rows.push_back({systems[s], "overall", "-",
                                tokens ? format_real(static_cast<double>(exact) / static_cast<double>(tokens)) : "NA",
                                optional_real(kappa)});
      if (tokens > 0) {
        for (const auto& ta : annotation::per_type_agreement(labelings, typology, true)) {
          agreement_rows.push_back({systems[s], "type", ta.code, format_real(ta.proportion),
                                    ta.kappa_defined ? format_real(ta.kappa) : "NA"});
        }
      }
      if (!o.factors.empty() && !chosen.empty()) {
        std::vector<double> ld;
        for (const auto& seg : chosen) ld.push_back(seg.factors.at("LD"));
        const auto edges = metrics::quantile_edges(ld, o.bins);
        for (const auto& b : annotation::kappa_by_bucket(labelings, ld, edges)) {
          agreement_rows.push_back({systems[s], "LD-bucket", format_real(b.lo) + ":" + format_real(b.hi),
                                    "NA", optional_real(b.kappa)});
        }
      }
    } else {
      spdlog::warn("annotate-stats: {} has {} annotators; agreement needs exactly 2", systems[s], annotators.size());
      agreement_rows.push_back({systems[s], "overall", "-", "NA", "NA"});
    }

    // Bucketed error rates.
    if (!chosen.empty()) {
      std::vector<annotation::Factor> factors{annotation::Factor::source_len};
      if (!o.factors.empty()) factors.push_back(annotation::Factor::lagging_difficulty);
      factors.push_back(annotation::Factor::target_rel_pos);
      if (!o.src.empty()) factors.push_back(annotation::Factor::source_rel_pos);
      for (auto f : factors) {
        const auto edges = annotation::default_edges(f, chosen, o.bins);
        const auto r = annotation::bucketed_error_rates(labelings, chosen, f, edges, typology);
        const std::string fname(annotation::factor_name(f));
        for (std::size_t c = 0; c < r.codes.size(); ++c) {
          for (std::size_t b = 0; b + 1 < r.edges.size(); ++b) {
            rate_rows.push_back({systems[s], fname, r.codes[c], std::to_string(b), format_real(r.edges[b]),
                                 format_real(r.edges[b + 1]), format_real(r.tokens[b]),
                                 format_real(r.error_tokens[c][b]), optional_real(r.rates[c][b])});
          }
          trend_rows.push_back({systems[s], fname, r.codes[c], optional_real(r.pearson[c])});
        }
      }
    }

    // Error counts against segment-level metrics.
    const auto counts = annotation::segment_error_counts(annots, ids, typology);
    std::vector<annotation::MetricColumn> columns(3);
    columns[0].first = "TER";
    columns[1].first = "SentBLEU";
    columns[2].first = "ROUGE-L";
    const auto sent_bleu = metrics::sentence_bleu(chosen, o.max_n);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (chosen[i].reference.empty()) {
        throw DataError("segment " + std::to_string(chosen[i].id) + " has an empty reference");
      }
      columns[0].second.push_back(metrics::ter(chosen[i].hypothesis, chosen[i].reference));
      columns[1].second.push_back(sent_bleu[i].value);
      columns[2].second.push_back(metrics::rouge_l(chosen[i].hypothesis, chosen[i].reference));
    }
    for (const char* f : {"confidence", "LD", "source_len", "length_ratio"}) {
      if (chosen.empty() || !chosen.front().factors.count(f)) continue;
      if (std::string(f) == "source_len" && o.src.empty()) continue;
      annotation::MetricColumn col{f, {}};
      for (const auto& seg : chosen) col.second.push_back(seg.factors.at(f));
      columns.push_back(std::move(col));
    }
    const auto corr = annotation::metric_error_correlation(counts, columns);
    for (std::size_t r = 0; r < corr.rows.size(); ++r) {
      for (std::size_t m = 0; m < corr.metrics.size(); ++m) {
        corr_rows.push_back({systems[s], corr.rows[r], corr.metrics[m], optional_real(corr.r[r][m])});
      }
    }
  }

  const auto matrix = annotation::error_counts(by_system, typology);
  std::vector<std::string> header{"code", "name"};
  header.insert(header.end(), matrix.systems.begin(), matrix.systems.end());
  std::vector<std::vector<std::string>> count_rows;
  for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
    const auto& code = matrix.rows[r];
    std::string name = code == annotation::kAccuracyTotal ? "Total accuracy"
                       : code == annotation::kFluencyTotal ? "Total fluency"
                       : code == annotation::kGrandTotal  ? "Total"
                                                          : typology.at(code).name;
    std::vector<std::string> row{code, name};
    for (auto c : matrix.counts[r]) row.push_back(std::to_string(c));
    count_rows.push_back(std::move(row));
  }
  write_table(dir / "counts.tsv", o, {}, header, count_rows);
  write_table(dir / "agreement.tsv", o, {}, {"system", "scope", "code", "proportion", "kappa"}, agreement_rows);
  write_table(dir / "error_rates.tsv", o, {"bins=" + std::to_string(o.bins)},
              {"system", "factor", "code", "bin", "lo", "hi", "tokens", "error_tokens", "rate"}, rate_rows);
  write_table(dir / "error_trends.tsv", o, {}, {"system", "factor", "code", "pearson_r"}, trend_rows);
  write_table(dir / "correlations.tsv", o, {}, {"system", "errors", "metric", "pearson_r"}, corr_rows);
}

void cmd_sample(const Options& o) {
  annotation::SamplingOptions so;
  so.seed = require_seed(o);
  so.n = o.n;
  so.bins = o.bins;
  so.unk_token = o.unk;
  if (o.factors.empty()) throw UsageError("missing required option --factors");
  if (o.src.empty()) throw UsageError("missing required option --src");
  const auto segments = build_segments(o.src, o.ref, read_hypotheses(o.hyp), o.factors);
  const auto plan = annotation::sample_segments(segments, so);
  std::map<std::size_t, std::size_t> bin_of;
  for (std::size_t b = 0; b < plan.bins.size(); ++b) {
    for (auto id : plan.bins[b]) bin_of[id] = b;
  }
  std::vector<std::vector<std::string>> rows;
  for (auto id : plan.sampled) {
    rows.push_back({std::to_string(id), std::to_string(segments[id].source.size()),
                    format_real(segments[id].factors.at("LD")), std::to_string(bin_of.at(id))});
  }
  write_table(prepare_output(o.output, "--output"), o,
              {"q1=" + format_real(plan.q1), "q3=" + format_real(plan.q3),
               "eligible=" + std::to_string(plan.eligible.size())},
              {"id", "src_len", "LD", "bin"}, rows);
}

}  // namespace simulmt::cli
