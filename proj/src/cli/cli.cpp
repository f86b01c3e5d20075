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

#include "simulmt/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "simulmt/error.hpp"
#include "simulmt/report.hpp"

namespace simulmt::cli {

namespace {

using nlohmann::json;

struct Command {
  const char* name;
  const char* help;
  void (*fn)(const Options&);
};

constexpr Command kCommands[] = {
    {"bpe", "Learn or apply BPE merge operations", cmd_bpe},
    {"filter", "Drop long or length-mismatched sentence pairs", cmd_filter},
    {"align", "Word-align a parallel corpus (Pharaoh output)", cmd_align},
    {"factors", "Per-segment lagging difficulty and wait-k AL", cmd_factors},
    {"train", "Train a TF or PA model", cmd_train},
    {"decode", "Greedy offline or wait-k decoding", cmd_decode},
    {"score", "BLEU/TER/ROUGE-L, paired bootstrap and bucketed BLEU", cmd_score},
    {"annotate-stats", "Error counts, agreement, bucketed rates and correlations", cmd_annotate_stats},
    {"sample", "LD-stratified segment sample for annotation", cmd_sample},
    {"demo", "Synthetic end-to-end run of every subcommand", cmd_demo},
};

void add_options(CLI::App* s, Options& o, std::uint64_t& seed) {
  const std::string name = s->get_name();
  auto is = [&](std::initializer_list<const char*> names) {
    return std::any_of(names.begin(), names.end(), [&](const char* n) { return name == n; });
  };
  s->add_option("--config", o.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  s->add_option("--seed", seed, "Seed for every stochastic step");

  if (is({"bpe"})) {
    s->add_option("--mode", o.bpe_mode, "learn or apply")->check(CLI::IsMember({"learn", "apply"}));
    s->add_option("--input", o.inputs, "Tokenized text file(s)");
    s->add_option("--merges", o.merges, "Number of merge operations to learn");
    s->add_option("--codes", o.codes, "Merge table path");
  }
  if (is({"filter", "align", "factors", "train", "decode", "score", "annotate-stats", "sample"})) {
    s->add_option("--src", o.src, "Source text, one sentence per line");
  }
  if (is({"filter", "align", "factors", "train"})) s->add_option("--tgt", o.tgt, "Target text");
  if (is({"filter"})) {
    s->add_option("--out-src", o.out_src, "Filtered source output");
    s->add_option("--out-tgt", o.out_tgt, "Filtered target output");
    s->add_option("--max-len", o.max_len, "Maximum tokens per side");
    s->add_option("--max-ratio", o.max_ratio, "Maximum length ratio");
  }
  if (is({"align"})) {
    s->add_option("--iterations", o.iterations, "EM iterations");
    s->add_option("--lambda", o.lambda, "Diagonal tension");
    s->add_option("--p-null", o.p_null, "Null-link prior");
  }
  if (is({"factors"})) s->add_option("--alignment", o.alignment, "Pharaoh alignment file");
  if (is({"factors", "decode"})) s->add_option("--k,--k-eval", o.k_eval, "Wait-k lag at evaluation");
  if (is({"train"})) {
    s->add_option("--k-train", o.k_train, "Wait-k lag for online training (0: wait until end)");
    s->add_option("--arch", o.arch, "TF or PA")->check(CLI::IsMember({"TF", "PA", "tf", "pa"}));
    s->add_option("--model-mode", o.model_mode, "offline or online")->check(CLI::IsMember({"offline", "online"}));
    s->add_option("--epochs", o.epochs, "Training epochs");
    s->add_option("--learning-rate,--lr", o.learning_rate, "Step size");
    s->add_option("--batch-size", o.batch_size, "Sentences per update");
    s->add_option("--optimizer", o.optimizer, "sgd or adam")->check(CLI::IsMember({"sgd", "adam"}));
    s->add_option("--clip-norm", o.clip_norm, "Batch gradient norm cap (0: off)");
    s->add_option("--embed-dim", o.embed_dim, "Embedding and channel width");
    s->add_option("--layers", o.layers, "Layer count (0: 2 for TF, 4 for PA)");
    s->add_option("--heads", o.heads, "TF attention heads");
    s->add_option("--ffn-dim", o.ffn_dim, "TF feed-forward width");
    s->add_option("--filter-width", o.filter_width, "PA filter width (odd)");
    s->add_option("--max-positions", o.max_positions, "TF position table size");
  }
  if (is({"decode"})) {
    s->add_option("--mode", o.decode_mode, "offline or waitk")->check(CLI::IsMember({"offline", "waitk"}));
    s->add_option("--max-len", o.decode_max_len, "Output length cap (0: 2|x| + 10)");
  }
  if (is({"train", "decode"})) s->add_option("--checkpoint", o.checkpoint, "Model checkpoint (JSON)");
  if (is({"score", "annotate-stats", "sample"})) s->add_option("--ref", o.ref, "Reference text");
  if (is({"score", "sample"})) s->add_option("--hyp", o.hyp, "Hypotheses: plain text or decode TSV");
  if (is({"score", "annotate-stats", "sample"})) s->add_option("--factors", o.factors, "Factor file from `factors`");
  if (is({"score"})) {
    s->add_option("--baseline", o.baseline, "Second system for paired bootstrap");
    s->add_option("--metrics", o.metrics, "bleu, ter, rouge-l")->delimiter(',');
    s->add_option("--max-n", o.max_n, "BLEU n-gram order");
    s->add_option("--resamples", o.resamples, "Bootstrap resamples");
    s->add_option("--sample-size", o.sample_size, "Segments per bootstrap resample");
    s->add_option("--significance", o.significance, "Win-rate level for significance");
    s->add_option("--bucket-by", o.bucket_by, "source_len and/or LD")->delimiter(',');
  }
  if (is({"score", "annotate-stats", "sample"})) s->add_option("--bins", o.bins, "Number of bins");
  if (is({"annotate-stats"})) {
    s->add_option("--systems", o.systems, "System names")->delimiter(',');
    s->add_option("--hyps", o.hyps, "Hypothesis file per system")->delimiter(',');
    s->add_option("--annotations", o.annotations, "Annotation TSV per system")->delimiter(',');
    s->add_option("--sample", o.sample, "Restrict to the ids of a `sample` report");
  }
  if (is({"sample"})) {
    s->add_option("--n", o.n, "Sample size");
    s->add_option("--unk", o.unk, "Unknown-word token");
  }
  if (is({"bpe", "filter", "align", "factors", "train", "decode", "score", "sample"})) {
    s->add_option("--output", o.output, "Output path");
  }
  if (is({"annotate-stats", "demo"})) s->add_option("--output-dir", o.output_dir, "Output directory");
}

std::vector<std::string> json_values(const std::string& key, const json& v) {
  if (v.is_array()) {
    std::vector<std::string> out;
    for (const auto& e : v) {
      auto sub = json_values(key, e);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  if (v.is_string()) return {v.get<std::string>()};
  if (v.is_boolean()) return {v.get<bool>() ? "true" : "false"};
  if (v.is_number_integer() || v.is_number_unsigned()) return {v.dump()};
  if (v.is_number_float()) return {v.dump()};
  throw DataError("config: unsupported value for '" + key + "'");
}

std::string option_name(const std::string& key) {
  std::string name = "--" + key;
  std::replace(name.begin(), name.end(), '_', '-');
  return name;
}

// Values from the config file fill every option the command line left unset.
void apply_config(const CLI::App& app, CLI::App* sub, const json& config) {
  if (!config.is_object()) throw DataError("config: top level must be a JSON object");
  auto set = [&](const std::string& key, const json& value, bool strict) {
    if (key == "config") throw DataError("config: nested config files are not supported");
    CLI::Option* opt = sub->get_option_no_throw(option_name(key));
    if (!opt) {
      bool known = false;
      for (const auto* other : app.get_subcommands({})) known = known || other->get_option_no_throw(option_name(key));
      if (strict || !known) throw UsageError("config: unknown key '" + key + "'");
      return;
    }
    if (opt->count() > 0) return;
    for (const auto& s : json_values(key, value)) opt->add_result(s);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config: bad value for '" + key + "': " + e.what());
    }
  };
  for (const auto& [key, value] : config.items()) {
    if (value.is_object()) {
      const bool is_command = std::any_of(std::begin(kCommands), std::end(kCommands),
                                          [&](const Command& c) { return key == c.name; });
      if (!is_command) throw UsageError("config: unknown section '" + key + "'");
      if (key != sub->get_name()) continue;
      for (const auto& [k, v] : value.items()) set(k, v, true);
    } else {
      set(key, value, false);
    }
  }
}

void configure_logging() {
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("SIMULMT_LOG")) {
    const auto parsed = spdlog::level::from_str(env);
    if (parsed != spdlog::level::off || std::string(env) == "off") level = parsed;
  }
  spdlog::set_level(level);
  spdlog::set_pattern("[%l] %v");
}

}  // namespace

void dispatch(const std::vector<std::string>& args, std::ostream& out) {
  Options o;
  std::uint64_t seed = 0;
  CLI::App app{"Simultaneous MT training, decoding and evaluation toolkit", "simulmt"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(report::kToolVersion));
  for (const auto& c : kCommands) add_options(app.add_subcommand(c.name, c.help), o, seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return;
  } catch (const CLI::CallForVersion&) {
    out << report::kToolVersion << '\n';
    return;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  o.command = sub->get_name();
  if (!o.config.empty()) {
    std::ifstream in(o.config, std::ios::binary);
    if (!in) throw DataError("cannot open config " + o.config);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json config;
    try {
      config = json::parse(text);
    } catch (const json::exception& e) {
      throw DataError("config " + o.config + ": " + e.what());
    }
    apply_config(app, sub, config);
    o.config_hash = report::hex64(report::fnv1a64(text));
  }
  if (sub->get_option("--seed")->count() > 0) o.seed = seed;

  for (const auto& c : kCommands) {
    if (o.command == c.name) {
      spdlog::debug("running {} (config {})", c.name, o.config_hash);
      c.fn(o);
      return;
    }
  }
  throw UsageError("unknown subcommand " + o.command);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  try {
    dispatch(args, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "simulmt: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "simulmt: numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "simulmt: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "simulmt: error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace simulmt::cli
