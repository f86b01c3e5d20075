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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "annotation_fixtures.hpp"
#include "metric_fixtures.hpp"
#include "oracles.hpp"
#include "simulmt/align.hpp"
#include "simulmt/annotation.hpp"
#include "simulmt/cli.hpp"
#include "simulmt/latency.hpp"
#include "simulmt/metrics.hpp"
#include "simulmt/models/model.hpp"
#include "support.hpp"
#include "synthetic.hpp"

using namespace simulmt;
using namespace simulmt::models;
namespace fs = std::filesystem;

namespace {

struct Result {
  bool pass;
  std::string detail;
};

constexpr Architecture kArchs[] = {Architecture::TF, Architecture::PA};

TokenIds random_ids(std::mt19937_64& rng, std::size_t len, std::size_t vocab) {
  std::uniform_int_distribution<int> id(Vocabulary::kEos + 1, static_cast<int>(vocab) - 1);
  TokenIds out(len);
  for (auto& t : out) t = id(rng);
  return out;
}

Result waitk_closed_form() {
  double worst = 0;
  for (std::size_t n = 1; n <= 20; ++n) {
    for (std::size_t k = 1; k < n; ++k) {
      worst = std::max(worst, std::abs(latency::average_lagging(latency::waitk_path(k, n, n)).al - double(k)));
    }
  }
  return {worst <= 1e-9, "max |AL - k| = " + std::to_string(worst)};
}

Result ld_fixture() {
  const align::AlignmentSet a(4, 4, {{1, 1}, {2, 3}, {3, 2}, {4, 4}});
  const auto path = latency::reference_path(a);
  const double ld = latency::lagging_difficulty(testing::pair("a b c d", "w x y z"), a);
  return {path.z() == std::vector<std::size_t>{1, 3, 3, 4} && ld == 1.25, "LD = " + std::to_string(ld)};
}

Result wait_until_end() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  int bad = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = len(rng), m = len(rng);
    const auto r = latency::average_lagging(latency::DecodingPath(std::vector<std::size_t>(m, n), n));
    bad += r.tau != 1 || r.al != double(n);
  }
  return {bad == 0, std::to_string(bad) + " of 500 paths off"};
}

Result prefix_invariance() {
  std::mt19937_64 rng(4);
  int failures = 0, draws = 0;
  const auto v = synthetic::letters(8);
  for (auto a : kArchs) {
    for (int i = 0; i < 100; ++i, ++draws) {
      const auto p = init_params(ModelConfig::tiny(a, Mode::online, v.size()), v, 1000 + i);
      const auto src = random_ids(rng, 2 + i % 7, v.size());
      const auto prefix = random_ids(rng, i % 5, v.size());
      const std::size_t z = 1 + rng() % (src.size() - 1);
      auto other = src;
      for (std::size_t j = z; j < src.size(); ++j) {
        do other[j] = random_ids(rng, 1, v.size())[0];
        while (other[j] == src[j]);
      }
      failures += forward_step(p, src, z, prefix) != forward_step(p, other, z, prefix);
    }
  }
  return {failures == 0, std::to_string(failures) + " failures in " + std::to_string(draws) + " draws"};
}

Result wait_infinity() {
  std::mt19937_64 rng(5);
  const auto v = synthetic::letters(8);
  int mismatches = 0;
  for (int i = 0; i < 20; ++i) {
    const auto arch = kArchs[i % 2];
    const auto mode = i % 4 < 2 ? Mode::offline : Mode::online;
    const auto p = init_params(ModelConfig::tiny(arch, mode, v.size()), v, 2000 + i);
    const auto src = random_ids(rng, 2 + i % 6, v.size());
    const auto g = greedy_decode(p, src, 2 * src.size() + 10);
    const auto w = waitk_decode(p, src, src.size() + i % 3, 2 * src.size() + 10);
    mismatches += g.tokens != w.tokens;
  }
  return {mismatches == 0, std::to_string(mismatches) + " of 20 checkpoints differ"};
}

Result gradient_checks() {
  const auto v = synthetic::letters(8);
  const EncodedPair pair{{3, 4, 5, 6, 7}, {7, 3, 5, 4}, 0};
  bool ok = true;
  std::string detail;
  for (auto a : kArchs) {
    const auto p = init_params(ModelConfig::tiny(a, Mode::offline, v.size()), v, 6);
    const auto r = gradient_check(p, pair, 50, 1e-5, 6);
    const double frac = r.fraction_within(1e-4);
    ok = ok && r.samples.size() == 50 && frac >= 0.95;
    detail += std::string(to_string(a)) + " " + std::to_string(frac) + " ";
  }
  return {ok, "fraction within 1e-4: " + detail};
}

double sequence_accuracy(const ModelParams& p, const std::vector<EncodedPair>& test, std::size_t k) {
  std::size_t right = 0;
  for (const auto& e : test) {
    const auto h = k == 0 ? greedy_decode(p, e.source, 12) : waitk_decode(p, e.source, k, 12);
    right += h.tokens == synthetic::with_eos(e.target);
  }
  return double(right) / double(test.size());
}

Result latency_difficulty() {
  const auto v = synthetic::letters(8);
  bool ok = true;
  std::ostringstream detail;
  for (auto a : kArchs) {
    for (bool reverse : {false, true}) {
      const auto train_set = synthetic::task(1000, reverse, 1);
      const auto test_set = synthetic::task(200, reverse, 2);
      TrainOptions o;
      o.epochs = 20;
      o.learning_rate = 0.1;
      o.batch_size = 16;
      o.seed = 5;
      const auto offline =
          train(init_params(ModelConfig::tiny(a, Mode::offline, v.size()), v, 11), train_set, o).params;
      o.k_train = 1;
      const auto online = train(init_params(ModelConfig::tiny(a, Mode::online, v.size()), v, 11), train_set, o).params;
      const double off = sequence_accuracy(offline, test_set, 0);
      const double wait1 = sequence_accuracy(online, test_set, 1);
      ok = ok && off >= 0.95 && (reverse ? wait1 <= 0.30 : wait1 >= 0.95);
      detail << to_string(a) << (reverse ? " reversal" : " copy") << " offline=" << off << " wait1=" << wait1 << "; ";
    }
  }
  return {ok, detail.str()};
}

Result metric_oracles() {
  double worst = 0;
  std::vector<oracle::Words> hyps, refs;
  std::vector<metrics::EvalPair> all;
  for (const auto& [h, r] : fixtures::metric_pairs()) {
    metrics::EvalPair p;
    p.hypothesis = corpus::split_tokens(h);
    p.reference = corpus::split_tokens(r);
    hyps.push_back(p.hypothesis);
    refs.push_back(p.reference);
    all.push_back(p);
    worst = std::max(worst, std::abs(metrics::corpus_bleu({p}).value - oracle::corpus_bleu({p.hypothesis}, {p.reference})));
    worst = std::max(worst, std::abs(metrics::ter(p.hypothesis, p.reference) - oracle::ter(p.hypothesis, p.reference)));
  }
  worst = std::max(worst, std::abs(metrics::corpus_bleu(all).value - oracle::corpus_bleu(hyps, refs)));
  const bool identical = std::abs(metrics::corpus_score(metrics::bleu_metric(), refs, refs) - 100.0) <= 1e-9 &&
                         metrics::corpus_score(metrics::ter_metric(), refs, refs) == 0.0 &&
                         std::abs(metrics::corpus_score(metrics::rouge_l_metric(), refs, refs) - 100.0) <= 1e-9;
  return {worst <= 1e-9 && identical,
          "max oracle gap " + std::to_string(worst) + (identical ? ", identical input exact" : ", identical input off")};
}

Result bootstrap_null() {
  std::mt19937_64 rng(9);
  std::vector<metrics::Tokens> hyps, refs;
  for (int i = 0; i < 300; ++i) {
    metrics::Tokens h, r;
    for (int j = 0; j < 6; ++j) {
      r.push_back("w" + std::to_string(rng() % 20));
      h.push_back(rng() % 3 ? r.back() : "w" + std::to_string(rng() % 20));
    }
    hyps.push_back(h);
    refs.push_back(r);
  }
  int significant = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    metrics::BootstrapOptions o;
    o.sample_size = 3000;
    o.resamples = 100;
    o.seed = seed;
    significant += metrics::paired_bootstrap(hyps, hyps, refs, metrics::bleu_metric(), o).significant(0.95);
  }
  return {significant == 0, std::to_string(significant) + " of 20 runs significant"};
}

Result agreement_formulas() {
  const auto [a, b] = fixtures::kappa_confusion("mt");
  const double k = annotation::cohen_kappa(a, b);
  const double same = annotation::cohen_kappa(a, a);
  const double disjoint =
      annotation::cohen_kappa(std::vector<std::string>(10, "none"), std::vector<std::string>(10, "mt"));
  return {k == 0.6 && same == 1.0 && disjoint == 0.0,
          "kappa " + std::to_string(k) + " / " + std::to_string(same) + " / " + std::to_string(disjoint)};
}

Result aggregation_integrity() {
  const auto& mqm = annotation::ErrorTypology::mqm();
  const auto m = annotation::error_counts(fixtures::count_fixture(), mqm);
  int bad = 0;
  for (const auto& [system, counts] : fixtures::known_counts()) {
    long ac = 0, fl = 0;
    for (const auto& [code, n] : counts) {
      bad += m.at(code, system) != n;
      if (mqm.branch_of(code) == "ac") ac += n;
      if (mqm.branch_of(code) == "fl") fl += n;
    }
    bad += m.at("ac+", system) != ac;
    bad += m.at("fl+", system) != fl;
    bad += m.at("ac+fl", system) != ac + fl;
  }
  return {bad == 0, std::to_string(bad) + " mismatched cells"};
}

Result em_monotonicity() {
  std::mt19937_64 rng(12);
  double worst_drop = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<corpus::SentencePair> pairs;
    const std::size_t count = 5 + rng() % 46;
    for (std::size_t i = 0; i < count; ++i) {
      corpus::SentencePair p;
      p.id = i;
      for (std::size_t j = 1 + rng() % 8; j > 0; --j) p.source.push_back("s" + std::to_string(rng() % 10));
      for (std::size_t j = 1 + rng() % 8; j > 0; --j) p.target.push_back("t" + std::to_string(rng() % 10));
      pairs.push_back(p);
    }
    const auto ll = align::em_align(pairs, 10).log_likelihood;
    for (std::size_t i = 1; i < ll.size(); ++i) worst_drop = std::max(worst_drop, ll[i - 1] - ll[i]);
  }
  return {worst_drop <= 1e-9, "largest decrease " + std::to_string(worst_drop)};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testing::read_file(e.path().string());
  }
  return files;
}

Result pipeline_determinism() {
  testing::TempDir a, b;
  std::ostringstream out, err;
  const int ca = cli::run({"demo", "--seed", "7", "--output-dir", a.path().string()}, out, err);
  const int cb = cli::run({"demo", "--seed", "7", "--output-dir", b.path().string()}, out, err);
  if (ca != 0 || cb != 0) return {false, "demo failed: " + err.str()};
  const auto fa = snapshot(a.path()), fb = snapshot(b.path());
  return {fa == fb && !fa.empty(), std::to_string(fa.size()) + " files compared"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"wait-k AL closed form", waitk_closed_form},
      {"LD hand fixture", ld_fixture},
      {"wait-until-end AL", wait_until_end},
      {"prefix invariance", prefix_invariance},
      {"wait-infinity equivalence", wait_infinity},
      {"gradient checks", gradient_checks},
      {"latency-difficulty demonstration", latency_difficulty},
      {"metric oracles", metric_oracles},
      {"bootstrap null behavior", bootstrap_null},
      {"agreement formulas", agreement_formulas},
      {"aggregation integrity", aggregation_integrity},
      {"EM monotonicity", em_monotonicity},
      {"pipeline determinism", pipeline_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << " (" << r.detail << ", "
              << secs << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
