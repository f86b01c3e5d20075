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

#include <algorithm>
#include <cmath>

#include "simulmt/error.hpp"
#include "simulmt/models/model.hpp"

namespace simulmt::models {

namespace {

// Greedy loop under a fixed schedule: token t is written after reading
// read_count(t) source tokens.
template <typename Schedule>
Hypothesis decode(const ModelParams& params, const TokenIds& source, std::size_t max_len, Schedule read_count) {
  if (source.empty()) throw UsageError("decode: empty source");
  if (max_len == 0) throw UsageError("decode: max_len must be positive");
  TokenIds out;
  std::vector<std::size_t> contexts;
  double log_prob = 0.0;
  TokenIds target_in{Vocabulary::kBos};
  while (out.size() < max_len) {
    contexts.push_back(read_count(out.size() + 1));
    const Mat lp = log_softmax(logits_all(params, source, target_in, contexts).bottomRows(1));
    int best = 0;
    for (Eigen::Index v = 1; v < lp.cols(); ++v) {
      if (lp(0, v) > lp(0, best)) best = static_cast<int>(v);
    }
    log_prob += lp(0, best);
    out.push_back(best);
    if (best == Vocabulary::kEos) break;
    target_in.push_back(best);
  }
  return Hypothesis{out, latency::DecodingPath(contexts, source.size()), log_prob};
}

}  // namespace

Hypothesis greedy_decode(const ModelParams& params, const TokenIds& source, std::size_t max_len) {
  const std::size_t n = source.size();
  return decode(params, source, max_len, [n](std::size_t) { return n; });
}

Hypothesis waitk_decode(const ModelParams& params, const TokenIds& source, std::size_t k, std::size_t max_len) {
  if (k == 0) throw UsageError("waitk_decode: k must be positive");
  const std::size_t n = source.size();
  if (params.config.mode == Mode::offline && k < n) {
    throw UsageError("waitk_decode: offline model cannot decode with k=" + std::to_string(k) +
                     " below the source length " + std::to_string(n));
  }
  return decode(params, source, max_len, [k, n](std::size_t t) { return std::min(k + t - 1, n); });
}

Confidence sequence_log_prob(const ModelParams& params, const TokenIds& source, const Hypothesis& hyp) {
  if (hyp.tokens.empty()) throw UsageError("sequence_confidence: empty hypothesis");
  if (hyp.path.target_len() != hyp.tokens.size() || hyp.path.source_len() != source.size()) {
    throw UsageError("sequence_confidence: path does not match hypothesis and source");
  }
  TokenIds target_in{Vocabulary::kBos};
  target_in.insert(target_in.end(), hyp.tokens.begin(), hyp.tokens.end() - 1);
  const Mat lp = log_softmax(logits_all(params, source, target_in, hyp.path.z()));
  Confidence c;
  for (std::size_t t = 0; t < hyp.tokens.size(); ++t) c.sum += lp(static_cast<Eigen::Index>(t), hyp.tokens[t]);
  c.mean = c.sum / static_cast<double>(hyp.tokens.size());
  return c;
}

double sequence_confidence(const ModelParams& params, const TokenIds& source, const Hypothesis& hyp) {
  return sequence_log_prob(params, source, hyp).mean;
}

}  // namespace simulmt::models
