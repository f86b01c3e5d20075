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

#include <cmath>
#include <string>

#include "simulmt/error.hpp"
#include "simulmt/models/model.hpp"

namespace simulmt::models {

namespace {

Var linear(Graph& g, Var x, const std::string& w) { return g.matmul(x, g.param(w)); }

Var linear(Graph& g, Var x, const std::string& w, const std::string& b) {
  return g.add_bias(g.matmul(x, g.param(w)), g.param(b));
}

Var norm(Graph& g, Var x, const std::string& prefix) {
  return g.layer_norm(x, g.param(prefix + ".g"), g.param(prefix + ".b"));
}

Var attention_block(Graph& g, Var queries, Var memory, const std::string& p, std::size_t heads,
                    const std::vector<std::size_t>& limits) {
  Var q = linear(g, queries, p + ".q");
  Var k = linear(g, memory, p + ".k");
  Var v = linear(g, memory, p + ".v");
  return linear(g, g.attention(q, k, v, heads, limits), p + ".o");
}

Var feed_forward(Graph& g, Var x, const std::string& p) {
  Var h = g.relu(linear(g, x, p + ".w1", p + ".b1"));
  return linear(g, h, p + ".w2", p + ".b2");
}

std::vector<std::size_t> causal_limits(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i + 1;
  return out;
}

Var tf_logits(Graph& g, const ModelConfig& c, const TokenIds& source, const TokenIds& target_in,
              const std::vector<std::size_t>& contexts) {
  Var embed = g.param("embed");
  Var x = g.add(g.gather(embed, source), g.head_rows(g.param("enc.pos"), source.size()));
  const auto enc_limits = causal_limits(source.size());
  for (std::size_t l = 0; l < c.layer_count; ++l) {
    const auto p = "enc." + std::to_string(l);
    Var h = norm(g, x, p + ".ln1");
    x = g.add(x, attention_block(g, h, h, p + ".attn", c.heads, enc_limits));
    x = g.add(x, feed_forward(g, norm(g, x, p + ".ln2"), p + ".ffn"));
  }
  Var memory = norm(g, x, "enc.ln");

  Var y = g.add(g.gather(embed, target_in), g.head_rows(g.param("dec.pos"), target_in.size()));
  const auto dec_limits = causal_limits(target_in.size());
  for (std::size_t l = 0; l < c.layer_count; ++l) {
    const auto p = "dec." + std::to_string(l);
    Var h = norm(g, y, p + ".ln1");
    y = g.add(y, attention_block(g, h, h, p + ".self", c.heads, dec_limits));
    y = g.add(y, attention_block(g, norm(g, y, p + ".ln2"), memory, p + ".cross", c.heads, contexts));
    y = g.add(y, feed_forward(g, norm(g, y, p + ".ln3"), p + ".ffn"));
  }
  return linear(g, norm(g, y, "dec.ln"), "out.w", "out.b");
}

Var pa_logits(Graph& g, const ModelConfig& c, const TokenIds& source, const TokenIds& target_in,
              const std::vector<std::size_t>& contexts) {
  Var embed = g.param("embed");
  Var s = linear(g, g.gather(embed, source), "in.src");
  Var t = linear(g, g.gather(embed, target_in), "in.tgt", "in.b");
  const std::size_t m = target_in.size(), n = source.size();
  Var h = g.grid(t, s);
  const bool causal = c.mode == Mode::online;
  for (std::size_t l = 0; l < c.layer_count; ++l) {
    const auto p = "conv." + std::to_string(l);
    Var conv = g.masked_conv(h, m, n, g.param(p + ".w"), c.filter_width, causal);
    h = g.add(h, g.relu(g.add_bias(conv, g.param(p + ".b"))));
  }
  return linear(g, g.row_max_pool(h, m, n, contexts), "out.w", "out.b");
}

}  // namespace

std::vector<EncodedPair> encode_pairs(const Vocabulary& vocab, const std::vector<corpus::SentencePair>& pairs) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({vocab.encode(p.source), vocab.encode(p.target), p.id});
  return out;
}

Var build_logits(Graph& g, const ModelParams& params, const TokenIds& source, const TokenIds& target_in,
                 const std::vector<std::size_t>& contexts) {
  if (source.empty()) throw UsageError("model: empty source");
  if (target_in.empty()) throw UsageError("model: empty decoder input");
  if (contexts.size() != target_in.size()) throw UsageError("model: one read count per decoder row required");
  for (auto z : contexts) {
    if (z == 0) throw UsageError("model: read count 0 leaves no source context");
    if (z > source.size()) throw UsageError("model: read count exceeds the source length");
    if (params.config.mode == Mode::offline && z != source.size()) {
      throw UsageError("model: offline models must read the whole source");
    }
  }
  const auto& c = params.config;
  if (c.architecture == Architecture::TF &&
      std::max(source.size(), target_in.size()) > c.max_positions) {
    throw UsageError("model: sequence longer than max_positions=" + std::to_string(c.max_positions));
  }
  return c.architecture == Architecture::TF ? tf_logits(g, c, source, target_in, contexts)
                                             : pa_logits(g, c, source, target_in, contexts);
}

Mat logits_all(const ModelParams& params, const TokenIds& source, const TokenIds& target_in,
               const std::vector<std::size_t>& contexts) {
  Graph g(params.weights);
  return g.value(build_logits(g, params, source, target_in, contexts));
}

Mat log_softmax(const Mat& logits) {
  Mat out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    out.row(r) = logits.row(r).array() - lse;
  }
  return out;
}

StepDistribution forward_step(const ModelParams& params, const TokenIds& source,
                              const std::vector<std::size_t>& contexts, const TokenIds& prefix) {
  TokenIds target_in;
  target_in.reserve(prefix.size() + 1);
  target_in.push_back(Vocabulary::kBos);
  target_in.insert(target_in.end(), prefix.begin(), prefix.end());
  const Mat logits = logits_all(params, source, target_in, contexts);
  const Mat lp = log_softmax(logits.bottomRows(1));
  StepDistribution out(static_cast<std::size_t>(lp.cols()));
  for (Eigen::Index v = 0; v < lp.cols(); ++v) out[static_cast<std::size_t>(v)] = std::exp(lp(0, v));
  return out;
}

StepDistribution forward_step(const ModelParams& params, const TokenIds& source, std::size_t z,
                              const TokenIds& prefix) {
  if (z == 0) throw UsageError("forward_step: z must be positive");
  return forward_step(params, source, std::vector<std::size_t>(prefix.size() + 1, z), prefix);
}

StepDistribution tf_forward_step(const ModelParams& params, const TokenIds& source, std::size_t z,
                                 const TokenIds& prefix) {
  if (params.config.architecture != Architecture::TF) throw UsageError("tf_forward_step: model is not TF");
  return forward_step(params, source, z, prefix);
}

StepDistribution pa_forward_step(const ModelParams& params, const TokenIds& source, std::size_t z,
                                 const TokenIds& prefix) {
  if (params.config.architecture != Architecture::PA) throw UsageError("pa_forward_step: model is not PA");
  return forward_step(params, source, z, prefix);
}

int argmax(const StepDistribution& dist) {
  if (dist.empty()) throw UsageError("argmax of an empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.size(); ++i) {
    if (dist[i] > dist[best]) best = i;
  }
  return static_cast<int>(best);
}

}  // namespace simulmt::models
