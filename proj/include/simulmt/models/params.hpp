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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "simulmt/corpus.hpp"
#include "simulmt/models/graph.hpp"

namespace simulmt::models {

enum class Architecture { TF, PA };
enum class Mode { offline, online };

std::string_view to_string(Architecture a);
std::string_view to_string(Mode m);
Architecture parse_architecture(std::string_view s);
Mode parse_mode(std::string_view s);

using TokenIds = std::vector<int>;

/// Joint source/target vocabulary with three reserved entries.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& tokens);
  /// Specials followed by every corpus token in sorted order.
  static Vocabulary build(const std::vector<corpus::SentencePair>& pairs);

  int add(const std::string& token);
  int id(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  TokenIds encode(const corpus::Tokens& tokens) const;
  corpus::Tokens decode(const TokenIds& ids) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> index_;
};

struct ModelConfig {
  Architecture architecture = Architecture::TF;
  Mode mode = Mode::offline;
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;
  std::size_t layer_count = 2;   // TF: encoder and decoder layers; PA: conv layers
  std::size_t heads = 2;         // TF only
  std::size_t ffn_dim = 64;      // TF only
  std::size_t filter_width = 3;  // PA only
  std::size_t max_positions = 64;

  /// Desk-scale defaults for each architecture.
  static ModelConfig tiny(Architecture a, Mode m, std::size_t vocab_size);
  /// Throws UsageError on inconsistent dimensions.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Weight names and shapes implied by a config.
std::map<std::string, std::pair<std::size_t, std::size_t>> weight_shapes(const ModelConfig& config);

struct ModelParams {
  ModelConfig config;
  Vocabulary vocab;
  Weights weights;

  /// Throws NumericError naming the first non-finite weight, UsageError on
  /// shape mismatch against the config.
  void validate() const;
  std::size_t parameter_count() const;
};

/// Gaussian initialization scaled by fan-in; layer-norm gains 1, biases 0.
ModelParams init_params(const ModelConfig& config, const Vocabulary& vocab, std::uint64_t seed);
/// Every weight zero.
ModelParams zero_params(const ModelConfig& config, const Vocabulary& vocab);

inline constexpr int kCheckpointVersion = 1;

/// JSON checkpoint: format tag, version, config, vocabulary and named arrays.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_json(const ModelParams& params);
ModelParams checkpoint_from_json(std::string_view text);

}  // namespace simulmt::models
