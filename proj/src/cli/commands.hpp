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
#include <string>
#include <vector>

namespace simulmt::cli {

struct Options {
  std::string command;
  std::string config;
  std::string config_hash = "none";
  std::optional<std::uint64_t> seed;

  // Paths.
  std::vector<std::string> inputs;
  std::string src, tgt, ref, hyp, baseline;
  std::string out_src, out_tgt;
  std::string output, output_dir;
  std::string codes, alignment, factors, checkpoint, sample;
  std::vector<std::string> systems, hyps, annotations;

  // bpe / filter / align
  std::string bpe_mode = "learn";
  std::size_t merges = 1000;
  std::size_t max_len = 175;
  double max_ratio = 1.5;
  std::size_t iterations = 5;
  double lambda = 4.0;
  double p_null = 0.08;

  // Latency.
  std::size_t k_train = 7;
  std::size_t k_eval = 3;

  // Models.
  std::string arch = "TF";
  std::string model_mode = "offline";
  std::size_t epochs = 10;
  double learning_rate = 0.1;
  std::size_t batch_size = 16;
  std::string optimizer = "sgd";
  double clip_norm = 0.0;
  std::size_t embed_dim = 32;
  std::size_t layers = 0;  // 0: architecture default
  std::size_t heads = 2;
  std::size_t ffn_dim = 64;
  std::size_t filter_width = 3;
  std::size_t max_positions = 64;
  std::string decode_mode = "offline";
  std::size_t decode_max_len = 0;  // 0: 2|x| + 10

  // Scoring and analysis.
  std::vector<std::string> metrics{"bleu", "ter", "rouge-l"};
  std::size_t max_n = 4;
  std::size_t resamples = 1000;
  std::size_t sample_size = 3000;
  double significance = 0.95;
  std::size_t bins = 4;
  std::vector<std::string> bucket_by;  // empty: source_len when --src is given
  std::size_t n = 200;
  std::string unk = "<unk>";
};

/// "tool=...", "seed=...", "config=..." report metadata lines.
std::vector<std::string> provenance(const Options& o);
std::uint64_t require_seed(const Options& o);

void cmd_bpe(const Options& o);
void cmd_filter(const Options& o);
void cmd_align(const Options& o);
void cmd_factors(const Options& o);
void cmd_train(const Options& o);
void cmd_decode(const Options& o);
void cmd_score(const Options& o);
void cmd_annotate_stats(const Options& o);
void cmd_sample(const Options& o);
void cmd_demo(const Options& o);

}  // namespace simulmt::cli
