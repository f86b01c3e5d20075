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

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "simulmt/cli.hpp"
#include "simulmt/corpus.hpp"
#include "simulmt/error.hpp"
#include "simulmt/report.hpp"

namespace simulmt::cli {

namespace fs = std::filesystem;
using corpus::Tokens;

namespace {

constexpr std::size_t kLexicon = 14;
constexpr std::size_t kTrainPairs = 400;
constexpr std::size_t kTestPairs = 60;

// Word-for-word toy language with random adjacent swaps on the target side.
std::pair<std::vector<Tokens>, std::vector<Tokens>> synthetic_corpus(std::size_t count, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> length(3, 8), word(0, kLexicon - 1);
  std::bernoulli_distribution swap(0.3);
  std::vector<Tokens> src, tgt;
  for (std::size_t i = 0; i < count; ++i) {
    Tokens s, t;
    const auto n = length(rng);
    for (std::size_t j = 0; j < n; ++j) {
      const auto w = word(rng);
      s.push_back("s" + std::to_string(w));
      t.push_back("t" + std::to_string(w));
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (swap(rng)) {
        std::swap(t[j], t[j + 1]);
        ++j;
      }
    }
    src.push_back(std::move(s));
    tgt.push_back(std::move(t));
  }
  return {src, tgt};
}

std::vector<Tokens> hypotheses_of(const fs::path& decode_report) {
  const auto t = report::read_tsv(decode_report);
  const auto col = t.column("hypothesis");
  std::vector<Tokens> out;
  for (const auto& r : t.rows) out.push_back(corpus::split_tokens(r[col]));
  return out;
}

// Two rule-based annotators: "A" marks repeats as duplication, words absent
// from the reference as mistranslation and short outputs as omission; "B"
// follows the same rules but skips or relabels some spans at random.
void synthetic_annotations(const fs::path& path, const std::vector<Tokens>& sources, const std::vector<Tokens>& refs,
                           const std::vector<Tokens>& hyps, std::mt19937_64& rng) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "segment_id\tannotator\tcode\ttarget\tsource\n";
  std::bernoulli_distribution skip(0.2), relabel(0.15);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const std::set<std::string> ref_words(refs[i].begin(), refs[i].end());
    for (const char* who : {"A", "B"}) {
      const bool noisy = std::string(who) == "B";
      auto emit = [&](std::string code, std::size_t b, std::size_t e, const std::string& src_span) {
        if (noisy && skip(rng)) return;
        if (noisy && code == "mt" && relabel(rng)) code = "ol";
        out << i << '\t' << who << '\t' << code << '\t' << b << ':' << e << '\t' << src_span << '\n';
      };
      for (std::size_t t = 0; t < hyps[i].size(); ++t) {
        if (t > 0 && hyps[i][t] == hyps[i][t - 1]) {
          emit("du", t, t + 1, "-");
        } else if (!ref_words.count(hyps[i][t])) {
          emit("mt", t, t + 1, "-");
        }
      }
      if (hyps[i].size() < refs[i].size() && !sources[i].empty()) {
        const auto m = hyps[i].size(), n = sources[i].size();
        emit("om", m, m, std::to_string(n - 1) + ":" + std::to_string(n));
      }
    }
  }
}

}  // namespace

void cmd_demo(const Options& o) {
  const auto seed = require_seed(o);
  if (o.output_dir.empty()) throw UsageError("missing required option --output-dir");
  const fs::path dir(o.output_dir);
  fs::create_directories(dir / "data");
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  const std::string s = std::to_string(seed);

  std::mt19937_64 rng(seed);
  const auto [train_src, train_tgt] = synthetic_corpus(kTrainPairs, rng);
  const auto [test_src, test_tgt] = synthetic_corpus(kTestPairs, rng);
  corpus::write_lines(p("data/train.src"), train_src);
  corpus::write_lines(p("data/train.tgt"), train_tgt);
  corpus::write_lines(p("data/test.src"), test_src);
  corpus::write_lines(p("data/test.tgt"), test_tgt);

  auto step = [&](std::vector<std::string> args) {
    spdlog::info("demo: {}", args.front());
    std::ostringstream sink;
    dispatch(args, sink);
  };

  step({"bpe", "--mode", "learn", "--input", p("data/train.src"), "--input", p("data/train.tgt"), "--merges", "20",
        "--codes", p("bpe.codes")});
  for (const char* f : {"train.src", "train.tgt", "test.src"}) {
    step({"bpe", "--mode", "apply", "--codes", p("bpe.codes"), "--input", p(std::string("data/") + f), "--output",
          p(std::string("data/") + f + ".bpe")});
  }
  step({"filter", "--src", p("data/train.src.bpe"), "--tgt", p("data/train.tgt.bpe"), "--out-src",
        p("data/train.filt.src"), "--out-tgt", p("data/train.filt.tgt"), "--max-len", "175", "--max-ratio", "1.5"});
  step({"align", "--src", p("data/test.src"), "--tgt", p("data/test.tgt"), "--iterations", "5", "--output",
        p("test.align")});
  step({"factors", "--src", p("data/test.src"), "--tgt", p("data/test.tgt"), "--alignment", p("test.align"),
        "--k-eval", "3", "--output", p("factors.tsv")});
  for (const char* mode : {"offline", "online"}) {
    const std::string m(mode);
    step({"train", "--src", p("data/train.filt.src"), "--tgt", p("data/train.filt.tgt"), "--arch", "TF",
          "--model-mode", m, "--k-train", "3", "--epochs", "15", "--learning-rate", "0.1", "--seed", s,
          "--checkpoint", p("tf_" + m + ".json"), "--output", p("tf_" + m + ".loss.tsv")});
  }
  step({"decode", "--checkpoint", p("tf_offline.json"), "--src", p("data/test.src.bpe"), "--mode", "offline",
        "--output", p("hyp_offline.tsv")});
  step({"decode", "--checkpoint", p("tf_online.json"), "--src", p("data/test.src.bpe"), "--mode", "waitk", "--k",
        "3", "--output", p("hyp_online.tsv")});
  step({"score", "--hyp", p("hyp_online.tsv"), "--baseline", p("hyp_offline.tsv"), "--ref", p("data/test.tgt"),
        "--src", p("data/test.src"), "--factors", p("factors.tsv"), "--bucket-by", "source_len,LD", "--bins", "3",
        "--resamples", "200", "--sample-size", "60", "--seed", s, "--output", p("score.tsv")});
  step({"sample", "--src", p("data/test.src"), "--ref", p("data/test.tgt"), "--hyp", p("hyp_online.tsv"),
        "--factors", p("factors.tsv"), "--n", "12", "--bins", "3", "--seed", s, "--output", p("sample.tsv")});
  for (const char* sys : {"offline", "online"}) {
    synthetic_annotations(p(std::string("annotations_") + sys + ".tsv"), test_src, test_tgt,
                          hypotheses_of(p(std::string("hyp_") + sys + ".tsv")), rng);
  }
  step({"annotate-stats", "--src", p("data/test.src"), "--ref", p("data/test.tgt"), "--hyps",
        p("hyp_offline.tsv"), "--hyps", p("hyp_online.tsv"), "--systems", "offline,online", "--annotations",
        p("annotations_offline.tsv"), "--annotations", p("annotations_online.tsv"), "--factors", p("factors.tsv"),
        "--sample", p("sample.tsv"), "--bins", "3", "--output-dir", p("stats")});
}

}  // namespace simulmt::cli
