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

#include "simulmt/models/params.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "simulmt/error.hpp"

namespace simulmt::models {

using nlohmann::json;

std::string_view to_string(Architecture a) { return a == Architecture::TF ? "TF" : "PA"; }
std::string_view to_string(Mode m) { return m == Mode::offline ? "offline" : "online"; }

Architecture parse_architecture(std::string_view s) {
  if (s == "TF" || s == "tf") return Architecture::TF;
  if (s == "PA" || s == "pa") return Architecture::PA;
  throw UsageError("unknown architecture '" + std::string(s) + "' (expected TF or PA)");
}

Mode parse_mode(std::string_view s) {
  if (s == "offline") return Mode::offline;
  if (s == "online") return Mode::online;
  throw UsageError("unknown model mode '" + std::string(s) + "' (expected offline or online)");
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() {
  add("<unk>");
  add("<s>");
  add("</s>");
}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  if (tokens.size() < 3 || tokens[0] != "<unk>" || tokens[1] != "<s>" || tokens[2] != "</s>") {
    throw DataError("vocabulary must start with <unk>, <s>, </s>");
  }
  for (const auto& t : tokens) {
    if (index_.count(t)) throw DataError("vocabulary: duplicate token '" + t + "'");
    add(t);
  }
}

Vocabulary Vocabulary::build(const std::vector<corpus::SentencePair>& pairs) {
  std::set<std::string> seen;
  for (const auto& p : pairs) {
    seen.insert(p.source.begin(), p.source.end());
    seen.insert(p.target.begin(), p.target.end());
  }
  Vocabulary v;
  for (const auto& t : seen) v.add(t);
  return v;
}

int Vocabulary::add(const std::string& token) {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw UsageError("vocabulary id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

TokenIds Vocabulary::encode(const corpus::Tokens& tokens) const {
  TokenIds out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

corpus::Tokens Vocabulary::decode(const TokenIds& ids) const {
  corpus::Tokens out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

// ---------------------------------------------------------------------------

ModelConfig ModelConfig::tiny(Architecture a, Mode m, std::size_t vocab_size) {
  ModelConfig c;
  c.architecture = a;
  c.mode = m;
  c.vocab_size = vocab_size;
  c.embed_dim = 32;
  c.layer_count = a == Architecture::TF ? 2 : 4;
  return c;
}

void ModelConfig::validate() const {
  if (vocab_size < 4) throw UsageError("model: vocab_size must be at least 4");
  if (embed_dim == 0 || layer_count == 0) throw UsageError("model: embed_dim and layer_count must be positive");
  if (max_positions == 0) throw UsageError("model: max_positions must be positive");
  if (architecture == Architecture::TF) {
    if (heads == 0 || embed_dim % heads != 0) throw UsageError("model: embed_dim must be divisible by heads");
    if (ffn_dim == 0) throw UsageError("model: ffn_dim must be positive");
  } else if (filter_width % 2 == 0) {
    throw UsageError("model: PA filter width must be odd");
  }
}

std::map<std::string, std::pair<std::size_t, std::size_t>> weight_shapes(const ModelConfig& c) {
  c.validate();
  std::map<std::string, std::pair<std::size_t, std::size_t>> s;
  const std::size_t d = c.embed_dim, V = c.vocab_size;
  s["embed"] = {V, d};
  s["out.w"] = {d, V};
  s["out.b"] = {1, V};
  if (c.architecture == Architecture::TF) {
    s["enc.pos"] = {c.max_positions, d};
    s["dec.pos"] = {c.max_positions, d};
    auto norm = [&](const std::string& p) {
      s[p + ".g"] = {1, d};
      s[p + ".b"] = {1, d};
    };
    auto attn = [&](const std::string& p) {
      for (const char* w : {".q", ".k", ".v", ".o"}) s[p + w] = {d, d};
    };
    auto ffn = [&](const std::string& p) {
      s[p + ".w1"] = {d, c.ffn_dim};
      s[p + ".b1"] = {1, c.ffn_dim};
      s[p + ".w2"] = {c.ffn_dim, d};
      s[p + ".b2"] = {1, d};
    };
    for (std::size_t l = 0; l < c.layer_count; ++l) {
      const auto e = "enc." + std::to_string(l);
      norm(e + ".ln1");
      attn(e + ".attn");
      norm(e + ".ln2");
      ffn(e + ".ffn");
      const auto dd = "dec." + std::to_string(l);
      norm(dd + ".ln1");
      attn(dd + ".self");
      norm(dd + ".ln2");
      attn(dd + ".cross");
      norm(dd + ".ln3");
      ffn(dd + ".ffn");
    }
    norm("enc.ln");
    norm("dec.ln");
  } else {
    const std::size_t w = c.filter_width;
    s["in.src"] = {d, d};
    s["in.tgt"] = {d, d};
    s["in.b"] = {1, d};
    for (std::size_t l = 0; l < c.layer_count; ++l) {
      s["conv." + std::to_string(l) + ".w"] = {(w / 2 + 1) * w * d, d};
      s["conv." + std::to_string(l) + ".b"] = {1, d};
    }
  }
  return s;
}

void ModelParams::validate() const {
  const auto shapes = weight_shapes(config);
  if (vocab.size() != config.vocab_size) {
    throw UsageError("model: vocabulary has " + std::to_string(vocab.size()) + " entries, config says " +
                     std::to_string(config.vocab_size));
  }
  if (shapes.size() != weights.size()) throw UsageError("model: weight set does not match the config");
  for (const auto& [name, shape] : shapes) {
    auto it = weights.find(name);
    if (it == weights.end()) throw UsageError("model: missing weight '" + name + "'");
    if (static_cast<std::size_t>(it->second.rows()) != shape.first ||
        static_cast<std::size_t>(it->second.cols()) != shape.second) {
      throw UsageError("model: weight '" + name + "' has the wrong shape");
    }
    if (!it->second.allFinite()) throw NumericError("model: weight '" + name + "' is not finite");
  }
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, w] : weights) n += static_cast<std::size_t>(w.size());
  return n;
}

namespace {

std::string last_component(const std::string& name) {
  const auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(dot + 1);
}

}  // namespace

ModelParams init_params(const ModelConfig& config, const Vocabulary& vocab, std::uint64_t seed) {
  ModelParams p{config, vocab, {}};
  std::mt19937_64 rng(seed);
  for (const auto& [name, shape] : weight_shapes(config)) {
    const auto r = static_cast<Eigen::Index>(shape.first), c = static_cast<Eigen::Index>(shape.second);
    const auto tail = last_component(name);
    Mat w;
    if (tail == "g") {
      w = Mat::Ones(r, c);
    } else if (tail == "b" || tail == "b1" || tail == "b2") {
      w = Mat::Zero(r, c);
    } else {
      const bool table = name == "embed" || name.ends_with(".pos");
      const double fan_in = static_cast<double>(table ? shape.second : shape.first);
      std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(fan_in));
      w.resize(r, c);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
    }
    p.weights.emplace(name, std::move(w));
  }
  p.validate();
  return p;
}

ModelParams zero_params(const ModelConfig& config, const Vocabulary& vocab) {
  ModelParams p{config, vocab, {}};
  for (const auto& [name, shape] : weight_shapes(config)) {
    p.weights.emplace(name, Mat::Zero(static_cast<Eigen::Index>(shape.first), static_cast<Eigen::Index>(shape.second)));
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

std::string checkpoint_json(const ModelParams& params) {
  params.validate();
  const auto& c = params.config;
  json j;
  j["format"] = "simulmt-checkpoint";
  j["version"] = kCheckpointVersion;
  j["config"] = {{"architecture", to_string(c.architecture)},
                 {"mode", to_string(c.mode)},
                 {"vocab_size", c.vocab_size},
                 {"embed_dim", c.embed_dim},
                 {"layer_count", c.layer_count},
                 {"heads", c.heads},
                 {"ffn_dim", c.ffn_dim},
                 {"filter_width", c.filter_width},
                 {"max_positions", c.max_positions}};
  j["vocab"] = params.vocab.tokens();
  json w = json::object();
  for (const auto& [name, m] : params.weights) {
    w[name] = {{"shape", {m.rows(), m.cols()}},
               {"data", std::vector<double>(m.data(), m.data() + m.size())}};
  }
  j["weights"] = std::move(w);
  return j.dump();
}

ModelParams checkpoint_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "simulmt-checkpoint") throw DataError("checkpoint: unknown format tag");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw DataError("checkpoint: unsupported version " + std::to_string(version));
    }
    const auto& jc = j.at("config");
    ModelConfig c;
    c.architecture = parse_architecture(jc.at("architecture").get<std::string>());
    c.mode = parse_mode(jc.at("mode").get<std::string>());
    c.vocab_size = jc.at("vocab_size").get<std::size_t>();
    c.embed_dim = jc.at("embed_dim").get<std::size_t>();
    c.layer_count = jc.at("layer_count").get<std::size_t>();
    c.heads = jc.at("heads").get<std::size_t>();
    c.ffn_dim = jc.at("ffn_dim").get<std::size_t>();
    c.filter_width = jc.at("filter_width").get<std::size_t>();
    c.max_positions = jc.at("max_positions").get<std::size_t>();
    ModelParams p{c, Vocabulary(j.at("vocab").get<std::vector<std::string>>()), {}};
    for (const auto& [name, jw] : j.at("weights").items()) {
      const auto shape = jw.at("shape").get<std::vector<Eigen::Index>>();
      const auto data = jw.at("data").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] * shape[1] != static_cast<Eigen::Index>(data.size())) {
        throw DataError("checkpoint: weight '" + name + "' has inconsistent shape");
      }
      Mat m(shape[0], shape[1]);
      std::copy(data.begin(), data.end(), m.data());
      p.weights.emplace(name, std::move(m));
    }
    p.validate();
    return p;
  } catch (const UsageError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  const auto text = checkpoint_json(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text << '\n';
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace simulmt::models
