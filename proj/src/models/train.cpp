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
#include <numeric>
#include <random>

#include "simulmt/error.hpp"
#include "simulmt/models/model.hpp"

namespace simulmt::models {

Optimizer parse_optimizer(std::string_view s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw UsageError("unknown optimizer '" + std::string(s) + "' (expected sgd or adam)");
}

std::vector<std::size_t> training_contexts(const ModelConfig& config, std::size_t source_len, std::size_t rows,
                                           std::size_t k_train) {
  std::vector<std::size_t> out(rows, source_len);
  if (config.mode == Mode::offline || k_train == kWaitInfinity) return out;
  for (std::size_t i = 0; i < rows; ++i) out[i] = std::min(k_train + i, source_len);
  return out;
}

namespace {

Var pair_loss_node(Graph& g, const ModelParams& params, const EncodedPair& pair, std::size_t k_train) {
  TokenIds target_in{Vocabulary::kBos};
  target_in.insert(target_in.end(), pair.target.begin(), pair.target.end());
  TokenIds targets = pair.target;
  targets.push_back(Vocabulary::kEos);
  const auto contexts = training_contexts(params.config, pair.source.size(), target_in.size(), k_train);
  return g.cross_entropy(build_logits(g, params, pair.source, target_in, contexts), targets);
}

}  // namespace

double pair_loss(const ModelParams& params, const EncodedPair& pair, std::size_t k_train) {
  Graph g(params.weights);
  return g.value(pair_loss_node(g, params, pair, k_train))(0, 0);
}

double pair_gradient(const ModelParams& params, const EncodedPair& pair, std::size_t k_train, Weights& gradients) {
  Graph g(params.weights, &gradients);
  Var loss = pair_loss_node(g, params, pair, k_train);
  g.backward(loss);
  return g.value(loss)(0, 0);
}

TrainResult train(ModelParams params, const std::vector<EncodedPair>& corpus, const TrainOptions& options) {
  if (corpus.empty()) throw UsageError("train: empty corpus");
  if (options.batch_size == 0) throw UsageError("train: batch_size must be positive");
  if (!(options.learning_rate >= 0.0)) throw UsageError("train: learning_rate must be non-negative");
  params.validate();

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  Weights first, second;
  std::size_t step = 0;

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  TrainResult result{std::move(params), {}};
  auto& weights = result.params.weights;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0, epoch_tokens = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      Weights grads;
      double loss = 0.0, tokens = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        const auto& pair = corpus[order[b]];
        loss += pair_gradient(result.params, pair, options.k_train, grads);
        tokens += static_cast<double>(pair.target.size() + 1);
      }
      if (!std::isfinite(loss)) {
        throw NumericError("train: non-finite loss in epoch " + std::to_string(epoch + 1) + ", batch starting at pair id " +
                           std::to_string(corpus[order[start]].id) + " (learning rate " +
                           std::to_string(options.learning_rate) + ")");
      }
      double norm_sq = 0.0;
      for (auto& [name, g] : grads) {
        g /= tokens;
        norm_sq += g.squaredNorm();
      }
      const double norm = std::sqrt(norm_sq);
      const double clip = options.clip_norm > 0.0 && norm > options.clip_norm ? options.clip_norm / norm : 1.0;
      ++step;
      for (auto& [name, g] : grads) {
        Mat& w = weights.at(name);
        if (clip != 1.0) g *= clip;
        if (options.optimizer == Optimizer::sgd) {
          w -= options.learning_rate * g;
          continue;
        }
        auto [m, fresh_m] = first.try_emplace(name, Mat::Zero(w.rows(), w.cols()));
        auto [v, fresh_v] = second.try_emplace(name, Mat::Zero(w.rows(), w.cols()));
        m->second = kBeta1 * m->second + (1.0 - kBeta1) * g;
        v->second = kBeta2 * v->second + (1.0 - kBeta2) * g.cwiseAbs2();
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        w.array() -= options.learning_rate * (m->second.array() / c1) /
                     ((v->second.array() / c2).sqrt() + kAdamEps);
      }
      epoch_loss += loss;
      epoch_tokens += tokens;
    }
    result.epoch_loss.push_back(epoch_loss / epoch_tokens);
    for (const auto& [name, w] : weights) {
      if (!w.allFinite()) {
        throw NumericError("train: weight '" + name + "' became non-finite in epoch " + std::to_string(epoch + 1));
      }
    }
  }
  return result;
}

double GradientCheckReport::fraction_within(double tolerance) const {
  if (samples.empty()) return 0.0;
  const auto ok = std::count_if(samples.begin(), samples.end(),
                                [&](const GradientSample& s) { return s.relative_error <= tolerance; });
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

GradientCheckReport gradient_check(const ModelParams& params, const EncodedPair& pair, std::size_t sample_count,
                                   double epsilon, std::uint64_t seed, std::size_t k_train) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) throw UsageError("gradient_check: epsilon must lie in [1e-7, 1e-3]");
  Weights grads;
  pair_gradient(params, pair, k_train, grads);

  GradientCheckReport report;
  std::vector<std::pair<std::string, Eigen::Index>> sizes;
  Eigen::Index total = 0;
  for (const auto& [name, w] : params.weights) {
    sizes.emplace_back(name, w.size());
    total += w.size();
    if (auto it = grads.find(name); it != grads.end()) report.gradient_norm += it->second.squaredNorm();
  }
  report.gradient_norm = std::sqrt(report.gradient_norm);

  ModelParams probe = params;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, total - 1);
  for (std::size_t s = 0; s < sample_count; ++s) {
    Eigen::Index flat = pick(rng);
    std::size_t which = 0;
    while (flat >= sizes[which].second) flat -= sizes[which++].second;
    const auto& name = sizes[which].first;
    double& slot = probe.weights.at(name).data()[flat];
    const double original = slot;
    slot = original + epsilon;
    const double up = pair_loss(probe, pair, k_train);
    slot = original - epsilon;
    const double down = pair_loss(probe, pair, k_train);
    slot = original;

    GradientSample g;
    g.weight = name;
    g.index = flat;
    auto it = grads.find(name);
    g.analytic = it == grads.end() ? 0.0 : it->second.data()[flat];
    g.numeric = (up - down) / (2.0 * epsilon);
    g.relative_error = std::abs(g.analytic - g.numeric) /
                       std::max({std::abs(g.analytic), std::abs(g.numeric), kGradientFloor});
    report.samples.push_back(g);
  }
  for (const auto& s : report.samples) {
    report.max_error = std::max(report.max_error, s.relative_error);
    report.mean_error += s.relative_error;
  }
  if (!report.samples.empty()) report.mean_error /= static_cast<double>(report.samples.size());
  return report;
}

}  // namespace simulmt::models
