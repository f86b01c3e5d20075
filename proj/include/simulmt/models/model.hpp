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
#include <string>
#include <vector>

#include "simulmt/latency.hpp"
#include "simulmt/models/graph.hpp"
#include "simulmt/models/params.hpp"

namespace simulmt::models {

/// Probabilities over the vocabulary for the next target token.
using StepDistribution = std::vector<double>;

struct Hypothesis {
  TokenIds tokens;             // includes the final </s> when one was emitted
  latency::DecodingPath path;  // one read count per token
  double log_prob = 0.0;       // raw sum of token log-probabilities
};

/// Source and target ids without the reserved <s> and </s> markers.
struct EncodedPair {
  TokenIds source;
  TokenIds target;
  std::size_t id = 0;
};

std::vector<EncodedPair> encode_pairs(const Vocabulary& vocab, const std::vector<corpus::SentencePair>& pairs);

// ---------------------------------------------------------------------------
// Forward computation

/// Logits for every row of `target_in` (which starts with <s>). Row i sees the
/// first contexts[i] source tokens. Offline models require every context to
/// equal |source|.
Var build_logits(Graph& g, const ModelParams& params, const TokenIds& source, const TokenIds& target_in,
                 const std::vector<std::size_t>& contexts);
Mat logits_all(const ModelParams& params, const TokenIds& source, const TokenIds& target_in,
               const std::vector<std::size_t>& contexts);

/// Next-token distribution after `prefix` (no <s>), every decoder row reading
/// the first z source tokens.
StepDistribution forward_step(const ModelParams& params, const TokenIds& source, std::size_t z,
                              const TokenIds& prefix);
/// Same, with the read count of each earlier row taken from `contexts`
/// (size |prefix| + 1).
StepDistribution forward_step(const ModelParams& params, const TokenIds& source,
                              const std::vector<std::size_t>& contexts, const TokenIds& prefix);
StepDistribution tf_forward_step(const ModelParams& params, const TokenIds& source, std::size_t z,
                                 const TokenIds& prefix);
StepDistribution pa_forward_step(const ModelParams& params, const TokenIds& source, std::size_t z,
                                 const TokenIds& prefix);

/// Lowest index among the maxima.
int argmax(const StepDistribution& dist);

/// Row-wise log-softmax.
Mat log_softmax(const Mat& logits);

// ---------------------------------------------------------------------------
// Decoding and scoring

Hypothesis greedy_decode(const ModelParams& params, const TokenIds& source, std::size_t max_len);
/// Read/write loop under wait-k. Offline models are accepted only when
/// k >= |source|, where the schedule degenerates to wait-until-end.
Hypothesis waitk_decode(const ModelParams& params, const TokenIds& source, std::size_t k, std::size_t max_len);

struct Confidence {
  double mean = 0.0;  // length-normalized log-probability
  double sum = 0.0;
};

Confidence sequence_log_prob(const ModelParams& params, const TokenIds& source, const Hypothesis& hyp);
double sequence_confidence(const ModelParams& params, const TokenIds& source, const Hypothesis& hyp);

// ---------------------------------------------------------------------------
// Training

inline constexpr std::size_t kWaitInfinity = 0;

/// Per-row read counts used in training: min(k + i, |x|) for online models
/// (k = kWaitInfinity reads everything), |x| for offline models.
std::vector<std::size_t> training_contexts(const ModelConfig& config, std::size_t source_len,
                                           std::size_t rows, std::size_t k_train);

/// Summed token cross-entropy of one pair, including the </s> step.
double pair_loss(const ModelParams& params, const EncodedPair& pair, std::size_t k_train);
/// Loss plus gradients added into `gradients`.
double pair_gradient(const ModelParams& params, const EncodedPair& pair, std::size_t k_train, Weights& gradients);

enum class Optimizer { sgd, adam };
Optimizer parse_optimizer(std::string_view s);

struct TrainOptions {
  std::size_t k_train = kWaitInfinity;
  std::size_t epochs = 1;
  double learning_rate = 0.1;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  double clip_norm = 0.0;  // 0 disables clipping of the batch gradient norm
  Optimizer optimizer = Optimizer::sgd;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean nats per target token, </s> included
};

/// Mini-batch training on token cross-entropy. Throws UsageError on an empty
/// corpus and NumericError when a batch loss or the updated weights stop
/// being finite.
TrainResult train(ModelParams params, const std::vector<EncodedPair>& corpus, const TrainOptions& options);

struct GradientSample {
  std::string weight;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradientCheckReport {
  std::vector<GradientSample> samples;
  double max_error = 0.0;
  double mean_error = 0.0;
  double gradient_norm = 0.0;  // norm of the full analytic gradient

  double fraction_within(double tolerance) const;
};

/// Relative errors below this magnitude floor are measured against it.
inline constexpr double kGradientFloor = 1e-8;

/// Central differences on `sample_count` coordinates drawn uniformly from all
/// weights. Throws UsageError unless epsilon lies in [1e-7, 1e-3].
GradientCheckReport gradient_check(const ModelParams& params, const EncodedPair& pair, std::size_t sample_count,
                                   double epsilon, std::uint64_t seed = 1, std::size_t k_train = kWaitInfinity);

}  // namespace simulmt::models
