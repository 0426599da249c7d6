#pragma once

// Single structured configuration with one section per stage. Partial config
// files overlay the defaults; unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tar/baselines.hpp"
#include "tar/error.hpp"
#include "tar/insight.hpp"
#include "tar/metrics.hpp"
#include "tar/model.hpp"
#include "tar/synth.hpp"
#include "tar/text_align.hpp"

namespace tar {

struct SplitConfig {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct EvalConfig {
  std::vector<std::size_t> ks = {1, 3, 5};
  MetricConfig metric;
  std::string split = "test";
};

// Significance fed to the learned model: the Sig_cluster value, or the
// extraction test's own value.
enum class ModelSignificance { Cluster, Extraction };

struct PipelineConfig {
  std::uint64_t seed = 7;
  SynthConfig synth;
  SplitConfig split;
  ExtractConfig extract = synth_extract_config();
  TextConfig text;
  ModelConfig model;
  TrainConfig train;
  BaselineConfig baseline;
  EvalConfig eval;
  ModelSignificance model_significance = ModelSignificance::Cluster;
  std::vector<std::string> methods = {"tar_memory", "tar_semantics", "tar_cnn",
                                      "sig_table",  "sig_dataset",   "sig_cluster"};

  // Propagate the global seed into every seeded stage.
  void apply_seed(std::uint64_t s) {
    seed = s;
    synth.seed = s;
    train.seed = s;
    baseline.kmeans.seed = s;
  }
};

inline bool is_model_method(std::string_view m) { return m.starts_with("tar"); }

inline bool is_baseline_method(std::string_view m) {
  return m == "sig_table" || m == "sig_dataset" || m == "sig_cluster";
}

inline BaselineMethod baseline_method_from_string(std::string_view s) {
  for (BaselineMethod m : {BaselineMethod::SigTable, BaselineMethod::SigDataset, BaselineMethod::SigCluster}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown baseline method '" + std::string(s) + "'");
}

inline void validate(const SplitConfig& s) {
  for (double r : {s.train, s.val, s.test}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("split ratios must lie in [0, 1]");
  }
  if (std::fabs(s.train + s.val + s.test - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
}

inline void validate(const PipelineConfig& c) {
  validate(c.synth);
  validate(c.split);
  if (c.text.sentence_weight < 0.0 || c.text.header_weight < 0.0 ||
      std::fabs(c.text.sentence_weight + c.text.header_weight - 1.0) > 1e-9) {
    throw ConfigError("text: sentence_weight and header_weight must be non-negative and sum to 1");
  }
  if (c.eval.ks.empty()) throw ConfigError("eval: ks must not be empty");
  for (std::size_t k : c.eval.ks) {
    if (k == 0) throw ConfigError("eval: k must be positive");
  }
  if (c.eval.split != "train" && c.eval.split != "val" && c.eval.split != "test") {
    throw ConfigError("eval: split must be train, val or test");
  }
  if (c.train.max_epochs == 0) throw ConfigError("train: max_epochs must be positive");
  if (!(c.train.lr > 0.0)) throw ConfigError("train: lr must be positive");
  for (const auto& m : c.methods) {
    if (is_model_method(m)) {
      model_variant_from_string(m);
    } else if (!is_baseline_method(m)) {
      throw ConfigError("unknown method '" + m + "'");
    }
  }
}

inline nlohmann::json to_json(const PipelineConfig& c) {
  using nlohmann::json;
  return {
      {"seed", c.seed},
      {"synth",
       {{"tables", c.synth.tables},
        {"min_items", c.synth.min_items},
        {"max_items", c.synth.max_items},
        {"years", c.synth.years},
        {"first_year_min", c.synth.first_year_min},
        {"first_year_max", c.synth.first_year_max},
        {"noise", c.synth.noise},
        {"increasing_share", c.synth.increasing_share},
        {"follow_majority", c.synth.follow_majority},
        {"spike_prob", c.synth.spike_prob},
        {"popularity_weight", c.synth.popularity_weight},
        {"context_weight", c.synth.context_weight},
        {"spike_weight", c.synth.spike_weight},
        {"group_weight", c.synth.group_weight},
        {"importance_jitter", c.synth.importance_jitter},
        {"importance_threshold", c.synth.importance_threshold},
        {"filler_sentences", c.synth.filler_sentences},
        {"measure", c.synth.measure}}},
      {"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
      {"extract",
       {{"threshold", c.extract.threshold},
        {"min_len", c.extract.min_len},
        {"point_series", c.extract.point_series == PointSeries::RawValues ? "raw" : "change_ratio"}}},
      {"text",
       {{"min_chars", c.text.min_chars},
        {"min_tokens", c.text.min_tokens},
        {"keywords", c.text.keywords},
        {"sentence_weight", c.text.sentence_weight},
        {"header_weight", c.text.header_weight},
        {"count_mode", c.text.count_mode == CountMode::Multiset ? "multiset" : "distinct"}}},
      {"model",
       {{"dim", c.model.dim},
        {"filters", c.model.filters},
        {"window", c.model.window},
        {"seq_len", c.model.seq_len},
        {"hidden", c.model.hidden},
        {"init_range", c.model.init_range},
        {"loss", c.model.loss == LossKind::SummedL2 ? "summed_l2" : "list_softmax"},
        {"significance", c.model_significance == ModelSignificance::Cluster ? "cluster" : "extraction"}}},
      {"train",
       {{"max_epochs", c.train.max_epochs},
        {"patience", c.train.patience},
        {"lr", c.train.lr},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"eps", c.train.eps},
        {"eval_k", c.train.eval_k}}},
      {"baseline",
       {{"point_series", c.baseline.point_series == PointSeries::RawValues ? "raw" : "change_ratio"},
        {"clusters", c.baseline.kmeans.k},
        {"restarts", c.baseline.kmeans.restarts},
        {"max_iter", c.baseline.kmeans.max_iter},
        {"embedding_path", c.baseline.embedding_path ? json(*c.baseline.embedding_path) : json(nullptr)}}},
      {"eval",
       {{"ks", c.eval.ks},
        {"relevance", c.eval.metric.mode == RelevanceMode::GoldTopK ? "gold_top_k" : "threshold"},
        {"relevance_threshold", c.eval.metric.relevance_threshold},
        {"split", c.eval.split}}},
      {"methods", c.methods},
  };
}

namespace detail {

class Section {
 public:
  Section(const nlohmann::json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config: '" + name_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config: '" + name_ + "." + key + "' has the wrong type");
    }
  }

  template <typename Enum>
  void get_enum(const char* key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> names) {
    std::string s;
    bool present = j_.contains(key);
    get(key, s);
    if (!present) return;
    for (const auto& [n, v] : names) {
      if (s == n) {
        out = v;
        return;
      }
    }
    throw ConfigError("config: '" + name_ + "." + key + "' has unknown value '" + s + "'");
  }

  void get_optional(const char* key, std::optional<std::string>& out) {
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    if (!j_.at(key).is_string()) throw ConfigError("config: '" + name_ + "." + key + "' must be a string or null");
    out = j_.at(key).get<std::string>();
  }

  std::optional<Section> sub(const char* key) {
    if (!j_.contains(key)) return std::nullopt;
    return std::optional<Section>(std::in_place, j_.at(key), key);
  }

 private:
  const nlohmann::json& j_;
  std::string name_;
};

// Every key of `j` must exist in `reference` (recursively for objects).
inline void check_known_keys(const nlohmann::json& j, const nlohmann::json& reference, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!reference.contains(k)) throw ConfigError("config: unknown key '" + where + "." + k + "'");
    if (reference.at(k).is_object()) check_known_keys(v, reference.at(k), k);
  }
}

}  // namespace detail

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  detail::check_known_keys(j, to_json(c), "config");
  {
    detail::Section root(j, "config");
    std::uint64_t seed = c.seed;
    root.get("seed", seed);
    c.apply_seed(seed);
    if (auto s = root.sub("synth")) {
      s->get("tables", c.synth.tables);
      s->get("min_items", c.synth.min_items);
      s->get("max_items", c.synth.max_items);
      s->get("years", c.synth.years);
      s->get("first_year_min", c.synth.first_year_min);
      s->get("first_year_max", c.synth.first_year_max);
      s->get("noise", c.synth.noise);
      s->get("increasing_share", c.synth.increasing_share);
      s->get("follow_majority", c.synth.follow_majority);
      s->get("spike_prob", c.synth.spike_prob);
      s->get("popularity_weight", c.synth.popularity_weight);
      s->get("context_weight", c.synth.context_weight);
      s->get("spike_weight", c.synth.spike_weight);
      s->get("group_weight", c.synth.group_weight);
      s->get("importance_jitter", c.synth.importance_jitter);
      s->get("importance_threshold", c.synth.importance_threshold);
      s->get("filler_sentences", c.synth.filler_sentences);
      s->get("measure", c.synth.measure);
    }
    if (auto s = root.sub("split")) {
      s->get("train", c.split.train);
      s->get("val", c.split.val);
      s->get("test", c.split.test);
    }
    if (auto s = root.sub("extract")) {
      s->get("threshold", c.extract.threshold);
      s->get("min_len", c.extract.min_len);
      s->get_enum("point_series", c.extract.point_series,
                  {{"raw", PointSeries::RawValues}, {"change_ratio", PointSeries::ChangeRatio}});
    }
    if (auto s = root.sub("text")) {
      s->get("min_chars", c.text.min_chars);
      s->get("min_tokens", c.text.min_tokens);
      s->get("keywords", c.text.keywords);
      s->get("sentence_weight", c.text.sentence_weight);
      s->get("header_weight", c.text.header_weight);
      s->get_enum("count_mode", c.text.count_mode,
                  {{"multiset", CountMode::Multiset}, {"distinct", CountMode::DistinctTypes}});
    }
    if (auto s = root.sub("model")) {
      s->get("dim", c.model.dim);
      s->get("filters", c.model.filters);
      s->get("window", c.model.window);
      s->get("seq_len", c.model.seq_len);
      s->get("hidden", c.model.hidden);
      s->get("init_range", c.model.init_range);
      s->get_enum("loss", c.model.loss, {{"summed_l2", LossKind::SummedL2}, {"list_softmax", LossKind::ListSoftmax}});
      s->get_enum("significance", c.model_significance,
                  {{"cluster", ModelSignificance::Cluster}, {"extraction", ModelSignificance::Extraction}});
    }
    if (auto s = root.sub("train")) {
      s->get("max_epochs", c.train.max_epochs);
      s->get("patience", c.train.patience);
      s->get("lr", c.train.lr);
      s->get("beta1", c.train.beta1);
      s->get("beta2", c.train.beta2);
      s->get("eps", c.train.eps);
      s->get("eval_k", c.train.eval_k);
    }
    if (auto s = root.sub("baseline")) {
      s->get_enum("point_series", c.baseline.point_series,
                  {{"raw", PointSeries::RawValues}, {"change_ratio", PointSeries::ChangeRatio}});
      s->get("clusters", c.baseline.kmeans.k);
      s->get("restarts", c.baseline.kmeans.restarts);
      s->get("max_iter", c.baseline.kmeans.max_iter);
      s->get_optional("embedding_path", c.baseline.embedding_path);
    }
    if (auto s = root.sub("eval")) {
      s->get("ks", c.eval.ks);
      s->get_enum("relevance", c.eval.metric.mode,
                  {{"gold_top_k", RelevanceMode::GoldTopK}, {"threshold", RelevanceMode::Threshold}});
      s->get("relevance_threshold", c.eval.metric.relevance_threshold);
      s->get("split", c.eval.split);
    }
    root.get("methods", c.methods);
  }
  validate(c);
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace tar
