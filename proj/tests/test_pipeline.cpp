#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"
#include "tar/pipeline.hpp"

using namespace tar;
using tar::testing::TempDir;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("t" + std::to_string(i));
  return out;
}

PipelineConfig smoke_config() {
  PipelineConfig c;
  c.apply_seed(5);
  c.synth.tables = 30;
  c.model.dim = 8;
  c.model.filters = 8;
  c.model.hidden = 8;
  c.train.max_epochs = 3;
  c.baseline.kmeans.k = 3;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Split, SixTwoTwoDisjoint) {
  const auto m = make_split(ids(10), SplitConfig{}, 7);
  EXPECT_EQ(m.train.size(), 6u);
  EXPECT_EQ(m.val.size(), 2u);
  EXPECT_EQ(m.test.size(), 2u);
  std::set<std::string> all;
  for (const auto* v : {&m.train, &m.val, &m.test}) {
    EXPECT_TRUE(std::is_sorted(v->begin(), v->end()));
    all.insert(v->begin(), v->end());
  }
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(m.all_ids(), [] {
    auto v = ids(10);
    std::sort(v.begin(), v.end());
    return v;
  }());
}

TEST(Split, DeterministicAndOrderIndependent) {
  auto shuffled = ids(25);
  std::reverse(shuffled.begin(), shuffled.end());
  const auto a = make_split(ids(25), SplitConfig{}, 3);
  const auto b = make_split(shuffled, SplitConfig{}, 3);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_NE(to_json(a), to_json(make_split(ids(25), SplitConfig{}, 4)));
  EXPECT_THROW(make_split(ids(5), SplitConfig{0.5, 0.5, 0.5}, 1), ConfigError);
}

TEST(Split, ManifestRoundTripAndOverlap) {
  const auto m = make_split(ids(10), SplitConfig{}, 7);
  EXPECT_EQ(to_json(manifest_from_json(to_json(m))), to_json(m));
  auto j = to_json(m);
  j["test"].push_back(m.train.front());
  EXPECT_THROW(manifest_from_json(j), DataError);
  EXPECT_THROW(manifest_from_json(nlohmann::json::object()), DataError);
  EXPECT_THROW(m.ids("dev"), ConfigError);
}

TEST(Dataset, MissingPieces) {
  TempDir dir;
  EXPECT_THROW(Dataset(dir.path()), DataError);
  try {
    load_manifest(dir / "split.json");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("run the split step first"), std::string::npos);
  }
}

TEST(ScopedTexts, RefusesOtherSplits) {
  TempDir dir;
  PipelineConfig cfg = smoke_config();
  cfg.synth.tables = 10;
  run_synth(cfg, dir.path());
  const auto m = run_split(cfg, dir.path());
  const Dataset ds(dir.path());
  const ScopedTexts train(ds, m, "train");
  EXPECT_NO_THROW(train.load(m.train.front()));
  try {
    train.load(m.test.front());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("outside the 'train' split"), std::string::npos);
  }
}

TEST(Pipeline, SmokeRunWritesArtifacts) {
  TempDir dir;
  const PipelineConfig cfg = smoke_config();
  const fs::path data = dir / "data", work = dir / "work";
  EXPECT_EQ(run_synth(cfg, data), 30u);
  const auto manifest = run_split(cfg, data);
  const auto res = run_pipeline(cfg, data, work);

  for (const char* f : {"config.json", "split.json", "insights.jsonl", "labels_train.jsonl", "labels_val.jsonl",
                        "labels_test.jsonl", "metrics.json", "report.txt"}) {
    EXPECT_TRUE(fs::exists(work / f)) << f;
  }
  for (const auto& m : cfg.methods) EXPECT_TRUE(fs::exists(work / ("predictions_" + m + ".jsonl"))) << m;
  for (const char* v : {"tar_memory", "tar_semantics", "tar_cnn"}) {
    EXPECT_TRUE(fs::exists(work / ("model_" + std::string(v)) / "params.json"));
  }

  ASSERT_EQ(res.reports.size(), cfg.methods.size());
  for (const auto& r : res.reports) {
    for (const auto& m : r.at) {
      EXPECT_GT(m.tables, 0u);
      for (double v : {m.precision, m.map, m.ndcg}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
  EXPECT_EQ(res.train_logs.size(), 3u);

  // Labels of each split cover only that split's tables.
  const std::set<std::string> test_ids(manifest.test.begin(), manifest.test.end());
  for (const auto& t : load_labels(work, "test")) EXPECT_TRUE(test_ids.contains(t.front().insight.table_id));

  // A reloaded model reproduces its predictions.
  const auto corpus = load_insights(work);
  const TarModel model = load_model(model_dir(work, ModelVariant::Memory));
  const auto preds = load_predictions(work / "predictions_tar_memory.jsonl");
  ASSERT_FALSE(preds.empty());
  const auto ranked = run_rank(cfg, work, ModelVariant::Memory, "test");
  std::vector<RankedPrediction> flat;
  for (const auto& t : ranked) flat.insert(flat.end(), t.begin(), t.end());
  ASSERT_EQ(flat.size(), preds.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    EXPECT_EQ(flat[i].insight_id, preds[i].insight_id);
    EXPECT_EQ(flat[i].score, preds[i].score);
  }
  EXPECT_EQ(model.vocab().size(), load_model(model_dir(work, ModelVariant::Memory)).vocab().size());
}

TEST(Pipeline, DeterministicMetrics) {
  TempDir dir;
  PipelineConfig cfg = smoke_config();
  cfg.synth.tables = 20;
  cfg.methods = {"tar_memory", "sig_cluster"};
  run_synth(cfg, dir / "data");
  run_split(cfg, dir / "data");
  run_pipeline(cfg, dir / "data", dir / "w1");
  run_pipeline(cfg, dir / "data", dir / "w2");
  const auto a = slurp(dir / "w1" / "metrics.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "w2" / "metrics.json"));
  EXPECT_EQ(slurp(dir / "w1" / "predictions_tar_memory.jsonl"), slurp(dir / "w2" / "predictions_tar_memory.jsonl"));
}

TEST(Pipeline, EvalRejectsIncompletePredictions) {
  TempDir dir;
  PipelineConfig cfg = smoke_config();
  cfg.synth.tables = 12;
  cfg.methods = {"sig_table"};
  run_synth(cfg, dir / "data");
  run_split(cfg, dir / "data");
  run_pipeline(cfg, dir / "data", dir / "w");
  const auto path = dir / "w" / "predictions_sig_table.jsonl";
  const auto text = slurp(path);
  std::ofstream(path) << text.substr(0, text.find('\n') + 1);
  EXPECT_THROW(run_eval(cfg, dir / "w", cfg.methods, "test"), DataError);
  EXPECT_THROW(run_eval(cfg, dir / "w", {"sig_dataset"}, "test"), DataError);
}
