#pragma once

// Pipeline stages over a dataset directory and a work directory.
//
// dataset/                 work/
//   tables/<id>.json         config.json          resolved configuration
//   texts/<id>.json          split.json           copy of the manifest used
//   split.json               insights.jsonl       every table of the manifest
//                            labels_<split>.jsonl gold scores per split
//                            model_<variant>/     params.json vocab.json model.json train_log.json
//                            predictions_<method>.jsonl
//                            metrics.json report.txt
//
// Text is only reachable through ScopedTexts, which refuses tables outside its split.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tar/baselines.hpp"
#include "tar/checkpoint.hpp"
#include "tar/config.hpp"
#include "tar/error.hpp"
#include "tar/insight.hpp"
#include "tar/jsonl.hpp"
#include "tar/metrics.hpp"
#include "tar/model.hpp"
#include "tar/synth.hpp"
#include "tar/table.hpp"
#include "tar/text_align.hpp"
#include "tar/tokenize.hpp"

namespace tar {

namespace fs = std::filesystem;

inline constexpr const char* kSplitNames[] = {"train", "val", "test"};

inline void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write file");
  out << content;
}

inline void write_json_file(const fs::path& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(name) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Split manifest

struct SplitManifest {
  std::uint64_t seed = 0;
  SplitConfig ratios;
  std::vector<std::string> train, val, test;

  const std::vector<std::string>& ids(std::string_view split) const {
    if (split == "train") return train;
    if (split == "val") return val;
    if (split == "test") return test;
    throw ConfigError("unknown split '" + std::string(split) + "'");
  }

  std::vector<std::string> all_ids() const {
    std::vector<std::string> out = train;
    out.insert(out.end(), val.begin(), val.end());
    out.insert(out.end(), test.begin(), test.end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline nlohmann::json to_json(const SplitManifest& m) {
  return {{"seed", m.seed},
          {"ratios", {{"train", m.ratios.train}, {"val", m.ratios.val}, {"test", m.ratios.test}}},
          {"train", m.train},
          {"val", m.val},
          {"test", m.test}};
}

inline SplitManifest manifest_from_json(const nlohmann::json& j, const std::string& where = "manifest") {
  try {
    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.ratios.train = j.at("ratios").at("train").get<double>();
    m.ratios.val = j.at("ratios").at("val").get<double>();
    m.ratios.test = j.at("ratios").at("test").get<double>();
    m.train = j.at("train").get<std::vector<std::string>>();
    m.val = j.at("val").get<std::vector<std::string>>();
    m.test = j.at("test").get<std::vector<std::string>>();
    std::set<std::string> seen;
    for (const auto& id : m.all_ids()) {
      if (!seen.insert(id).second) throw DataError(where + ": table '" + id + "' appears in more than one split");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
}

inline SplitManifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw DataError(path.string() + ": split manifest not found (run the split step first)");
  return manifest_from_json(detail::parse_file(path.string()), path.string());
}

// Seeded table-level split: ids are sorted, shuffled, and cut at the rounded
// ratio boundaries; each split is listed in sorted order.
inline SplitManifest make_split(std::vector<std::string> ids, const SplitConfig& ratios, std::uint64_t seed) {
  validate(ratios);
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n = static_cast<double>(ids.size());
  const std::size_t n_train = std::min(ids.size(), static_cast<std::size_t>(std::llround(ratios.train * n)));
  const std::size_t n_val =
      std::min(ids.size() - n_train, static_cast<std::size_t>(std::llround(ratios.val * n)));
  SplitManifest m;
  m.seed = seed;
  m.ratios = ratios;
  m.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  m.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
               ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  m.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
  for (auto* v : {&m.train, &m.val, &m.test}) std::sort(v->begin(), v->end());
  return m;
}

// ---------------------------------------------------------------------------
// Dataset access

class Dataset {
 public:
  explicit Dataset(fs::path root) : root_(std::move(root)) {
    if (!fs::is_directory(root_ / "tables")) throw DataError(root_.string() + ": no tables/ directory");
  }

  const fs::path& root() const { return root_; }

  std::vector<std::string> table_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(root_ / "tables")) {
      if (e.is_regular_file() && e.path().extension() == ".json") ids.push_back(e.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  Table table(const std::string& id) const {
    Table t = load_table((root_ / "tables" / (id + ".json")).string());
    if (t.id != id) throw DataError("table file " + id + ".json holds table '" + t.id + "'");
    return t;
  }

  fs::path text_path(const std::string& id) const { return root_ / "texts" / (id + ".json"); }

 private:
  fs::path root_;
};

class ScopedTexts {
 public:
  ScopedTexts(const Dataset& ds, const SplitManifest& manifest, std::string split)
      : ds_(ds), split_(std::move(split)) {
    const auto& ids = manifest.ids(split_);
    allowed_.insert(ids.begin(), ids.end());
  }

  DocumentText load(const std::string& table_id) const {
    if (!allowed_.contains(table_id)) {
      throw DataError("text of table '" + table_id + "' is outside the '" + split_ + "' split");
    }
    DocumentText doc = load_document(ds_.text_path(table_id).string());
    if (doc.table_id != table_id) throw DataError("text file of '" + table_id + "' names table '" + doc.table_id + "'");
    return doc;
  }

 private:
  const Dataset& ds_;
  std::string split_;
  std::set<std::string> allowed_;
};

// Tokens of every header of a table (dimension names and values); preprocessing keywords.
inline std::vector<std::string> table_header_tokens(const Table& t) {
  std::set<std::string> toks;
  for (const auto& n : t.dim_names) {
    for (auto& x : tokenize(n)) toks.insert(std::move(x));
  }
  for (const auto& c : t.cells) {
    for (const auto& v : c.dims) {
      for (auto& x : tokenize(v)) toks.insert(std::move(x));
    }
  }
  return {toks.begin(), toks.end()};
}

// ---------------------------------------------------------------------------
// Artifact I/O

inline Corpus group_by_table(const std::vector<Insight>& flat) {
  Corpus out;
  std::map<std::string, std::size_t> where;
  for (const auto& ins : flat) {
    auto [it, inserted] = where.try_emplace(ins.table_id, out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(ins);
  }
  return out;
}

inline Corpus load_insights(const fs::path& work) {
  std::vector<Insight> flat;
  for (const auto& j : read_jsonl((work / "insights.jsonl").string())) flat.push_back(insight_from_json(j));
  return group_by_table(flat);
}

inline std::vector<std::vector<LabeledInsight>> load_labels(const fs::path& work, const std::string& split) {
  std::vector<std::vector<LabeledInsight>> out;
  std::map<std::string, std::size_t> where;
  for (const auto& j : read_jsonl((work / ("labels_" + split + ".jsonl")).string())) {
    LabeledInsight li = labeled_insight_from_json(j);
    auto [it, inserted] = where.try_emplace(li.insight.table_id, out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(std::move(li));
  }
  return out;
}

inline std::vector<RankedPrediction> load_predictions(const fs::path& path) {
  std::vector<RankedPrediction> out;
  for (const auto& j : read_jsonl(path.string())) {
    try {
      out.push_back({j.at("table_id").get<std::string>(), j.at("insight_id").get<std::string>(),
                     j.at("score").get<double>(), j.at("rank").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

inline void write_predictions(const fs::path& path, const std::vector<std::vector<RankedPrediction>>& ranked,
                              std::string_view method) {
  std::string s;
  for (const auto& t : ranked) {
    for (const auto& p : t) s += to_json(p, method).dump() + "\n";
  }
  write_text_file(path, s);
}

inline nlohmann::json to_json(const ModelConfig& m) {
  return {{"dim", m.dim},         {"filters", m.filters},       {"window", m.window},
          {"seq_len", m.seq_len}, {"hidden", m.hidden},         {"init_range", m.init_range},
          {"variant", to_string(m.variant)},
          {"loss", m.loss == LossKind::SummedL2 ? "summed_l2" : "list_softmax"}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  try {
    ModelConfig m;
    m.dim = j.at("dim").get<std::size_t>();
    m.filters = j.at("filters").get<std::size_t>();
    m.window = j.at("window").get<std::size_t>();
    m.seq_len = j.at("seq_len").get<std::size_t>();
    m.hidden = j.at("hidden").get<std::size_t>();
    m.init_range = j.at("init_range").get<double>();
    m.variant = model_variant_from_string(j.at("variant").get<std::string>());
    const auto loss = j.at("loss").get<std::string>();
    if (loss != "summed_l2" && loss != "list_softmax") throw DataError("model.json: unknown loss '" + loss + "'");
    m.loss = loss == "summed_l2" ? LossKind::SummedL2 : LossKind::ListSoftmax;
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model.json: ") + e.what());
  }
}

inline fs::path model_dir(const fs::path& work, ModelVariant v) { return work / ("model_" + std::string(to_string(v))); }

inline void save_model(const TarModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  nn::save_parameters(model.params(), (dir / "params.json").string());
  write_json_file(dir / "vocab.json", model.vocab().to_json());
  write_json_file(dir / "model.json", to_json(model.config()));
}

inline TarModel load_model(const fs::path& dir) {
  const ModelConfig cfg = model_config_from_json(detail::parse_file((dir / "model.json").string()));
  TarModel model(cfg, Vocabulary::from_json(detail::parse_file((dir / "vocab.json").string())));
  model.set_params(nn::load_parameters((dir / "params.json").string()));
  return model;
}

// ---------------------------------------------------------------------------
// Stages

inline std::size_t run_synth(const PipelineConfig& cfg, const fs::path& dataset) {
  return run_stage("synth", [&] {
    const auto corpus = generate_corpus(cfg.synth);
    fs::create_directories(dataset / "tables");
    fs::create_directories(dataset / "texts");
    for (const auto& st : corpus) {
      write_json_file(dataset / "tables" / (st.table.id + ".json"), to_json(st.table));
      write_json_file(dataset / "texts" / (st.table.id + ".json"), document_json(st));
    }
    return corpus.size();
  });
}

inline SplitManifest run_split(const PipelineConfig& cfg, const fs::path& dataset) {
  return run_stage("split", [&] {
    const Dataset ds(dataset);
    auto m = make_split(ds.table_ids(), cfg.split, cfg.seed);
    write_json_file(dataset / "split.json", to_json(m));
    return m;
  });
}

inline Corpus run_extract(const PipelineConfig& cfg, const fs::path& dataset, const fs::path& work) {
  return run_stage("extract", [&] {
    const Dataset ds(dataset);
    const auto manifest = load_manifest(dataset / "split.json");
    fs::create_directories(work);
    write_json_file(work / "split.json", to_json(manifest));
    Corpus corpus;
    std::string out;
    for (const auto& id : manifest.all_ids()) {
      auto insights = extract_all(ds.table(id), cfg.extract);
      for (const auto& ins : insights) out += to_json(ins).dump() + "\n";
      if (!insights.empty()) corpus.push_back(std::move(insights));
    }
    write_text_file(work / "insights.jsonl", out);
    return corpus;
  });
}

inline std::vector<std::vector<LabeledInsight>> run_label(const PipelineConfig& cfg, const fs::path& dataset,
                                                          const fs::path& work, const std::string& split) {
  return run_stage("label", [&] {
    const Dataset ds(dataset);
    const auto manifest = load_manifest(work / "split.json");
    const ScopedTexts texts(ds, manifest, split);
    const Corpus corpus = load_insights(work);
    std::map<std::string, const std::vector<Insight>*> by_table;
    for (const auto& t : corpus) by_table[t.front().table_id] = &t;

    std::vector<std::vector<LabeledInsight>> out;
    std::string lines;
    for (const auto& id : manifest.ids(split)) {
      auto it = by_table.find(id);
      if (it == by_table.end()) continue;
      const Table table = ds.table(id);
      const DocumentText doc = texts.load(id);
      auto year = report_year(doc.meta);
      if (!year) year = report_year(table.meta);
      const auto sentences = preprocess(doc, cfg.text, table_header_tokens(table));
      auto labeled = label_insights(*it->second, sentences, cfg.text, year);
      for (const auto& li : labeled) lines += to_json(li).dump() + "\n";
      out.push_back(std::move(labeled));
    }
    write_text_file(work / ("labels_" + split + ".jsonl"), lines);
    return out;
  });
}

// Significance the model sees, by insight id.
inline std::map<std::string, double> model_significance(const PipelineConfig& cfg, const Corpus& corpus) {
  std::map<std::string, double> out;
  if (cfg.model_significance == ModelSignificance::Extraction) {
    for (const auto& t : corpus) {
      for (const auto& ins : t) out[ins.id] = ins.significance;
    }
    return out;
  }
  const auto sig = cluster_significance(corpus, cfg.baseline);
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    for (std::size_t i = 0; i < corpus[t].size(); ++i) out[corpus[t][i].id] = sig[t][i];
  }
  return out;
}

inline void apply_significance(std::vector<std::vector<LabeledInsight>>& tables,
                               const std::map<std::string, double>& sig) {
  for (auto& t : tables) {
    for (auto& li : t) li.insight.significance = sig.at(li.insight.id);
  }
}

inline TrainLog run_train(const PipelineConfig& cfg, const fs::path& work, ModelVariant variant) {
  return run_stage("train", [&] {
    const Corpus corpus = load_insights(work);
    const auto sig = model_significance(cfg, corpus);
    auto train_split = load_labels(work, "train");
    auto val_split = load_labels(work, "val");
    apply_significance(train_split, sig);
    apply_significance(val_split, sig);

    std::vector<Insight> train_insights;
    for (const auto& t : train_split) {
      for (const auto& li : t) train_insights.push_back(li.insight);
    }
    ModelConfig mc = cfg.model;
    mc.variant = variant;
    TarModel model(mc, Vocabulary::build(train_insights));
    model.initialize(cfg.seed);
    const TrainLog log = train(model, train_split, val_split, cfg.train);
    const fs::path dir = model_dir(work, variant);
    save_model(model, dir);
    write_json_file(dir / "train_log.json", to_json(log));
    return log;
  });
}

inline Corpus split_corpus(const Corpus& corpus, const SplitManifest& manifest, const std::string& split) {
  const auto& ids = manifest.ids(split);
  const std::set<std::string> keep(ids.begin(), ids.end());
  Corpus out;
  for (const auto& t : corpus) {
    if (keep.contains(t.front().table_id)) out.push_back(t);
  }
  return out;
}

inline std::vector<std::vector<RankedPrediction>> run_rank(const PipelineConfig& cfg, const fs::path& work,
                                                           ModelVariant variant, const std::string& split) {
  return run_stage("rank", [&] {
    const Corpus corpus = load_insights(work);
    const auto sig = model_significance(cfg, corpus);
    const auto manifest = load_manifest(work / "split.json");
    const TarModel model = load_model(model_dir(work, variant));
    std::vector<std::vector<RankedPrediction>> ranked;
    for (auto table : split_corpus(corpus, manifest, split)) {
      for (auto& ins : table) ins.significance = sig.at(ins.id);
      ranked.push_back(predict_ranking(model, table));
    }
    write_predictions(work / ("predictions_" + std::string(to_string(variant)) + ".jsonl"), ranked, to_string(variant));
    return ranked;
  });
}

// Baselines pool over every table of the manifest; only the split's rankings are written.
inline std::vector<std::vector<RankedPrediction>> run_baseline(const PipelineConfig& cfg, const fs::path& work,
                                                               BaselineMethod method, const std::string& split) {
  return run_stage("baseline", [&] {
    const Corpus corpus = load_insights(work);
    const auto manifest = load_manifest(work / "split.json");
    const auto& ids = manifest.ids(split);
    const std::set<std::string> keep(ids.begin(), ids.end());
    std::vector<std::vector<RankedPrediction>> ranked;
    for (auto& r : rank_baseline(method, corpus, cfg.baseline)) {
      if (!r.empty() && keep.contains(r.front().table_id)) ranked.push_back(std::move(r));
    }
    write_predictions(work / ("predictions_" + std::string(to_string(method)) + ".jsonl"), ranked, to_string(method));
    return ranked;
  });
}

inline std::vector<MetricReport> run_eval(const PipelineConfig& cfg, const fs::path& work,
                                          const std::vector<std::string>& methods, const std::string& split) {
  return run_stage("eval", [&] {
    const auto labels = load_labels(work, split);
    std::map<std::string, const std::vector<LabeledInsight>*> gold;
    for (const auto& t : labels) gold[t.front().insight.table_id] = &t;

    std::vector<MetricReport> reports;
    for (const auto& method : methods) {
      const auto preds = load_predictions(work / ("predictions_" + method + ".jsonl"));
      std::map<std::string, std::vector<RankedPrediction>> by_table;
      for (const auto& p : preds) by_table[p.table_id].push_back(p);
      std::vector<RankingPair> pairs;
      for (auto& [id, ranked] : by_table) {
        auto it = gold.find(id);
        if (it == gold.end()) throw DataError(method + ": table '" + id + "' has no gold labels in split " + split);
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
        pairs.push_back(make_ranking_pair(ranked, *it->second));
      }
      if (pairs.size() != gold.size()) {
        throw DataError(method + ": predictions cover " + std::to_string(pairs.size()) + " of " +
                        std::to_string(gold.size()) + " labeled tables");
      }
      try {
        reports.push_back(evaluate_corpus(pairs, cfg.eval.ks, cfg.eval.metric, method));
      } catch (const std::invalid_argument& e) {
        throw DataError(method + ": " + e.what());
      }
    }
    nlohmann::json j = {{"split", split}, {"reports", nlohmann::json::array()}};
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
    write_json_file(work / "metrics.json", j);
    write_text_file(work / "report.txt", format_report_table(reports));
    return reports;
  });
}

struct PipelineResult {
  std::vector<MetricReport> reports;
  std::map<std::string, TrainLog> train_logs;
};

// extract -> label -> (train -> rank | baseline) per method -> eval.
inline PipelineResult run_pipeline(const PipelineConfig& cfg, const fs::path& dataset, const fs::path& work) {
  validate(cfg);
  fs::create_directories(work);
  write_json_file(work / "config.json", to_json(cfg));
  run_extract(cfg, dataset, work);
  for (const char* split : kSplitNames) run_label(cfg, dataset, work, split);
  PipelineResult res;
  for (const auto& m : cfg.methods) {
    if (is_model_method(m)) {
      const ModelVariant v = model_variant_from_string(m);
      res.train_logs[m] = run_train(cfg, work, v);
      run_rank(cfg, work, v, cfg.eval.split);
    } else {
      run_baseline(cfg, work, baseline_method_from_string(m), cfg.eval.split);
    }
  }
  res.reports = run_eval(cfg, work, cfg.methods, cfg.eval.split);
  return res;
}

}  // namespace tar
