// Command-line driver. Exit codes: 0 success, 1 usage, 2 data error, 3 internal.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tar/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string dataset;
  std::string out;
  std::string split;
  std::string method;
  std::optional<std::size_t> k;
  std::optional<std::size_t> clusters;
};

tar::PipelineConfig resolve_config(const Options& o) {
  tar::PipelineConfig cfg = o.config.empty() ? tar::PipelineConfig{} : tar::load_config(o.config);
  if (o.seed) cfg.apply_seed(*o.seed);
  if (o.k) cfg.eval.ks = {*o.k};
  if (o.clusters) cfg.baseline.kmeans.k = *o.clusters;
  if (!o.split.empty()) cfg.eval.split = o.split;
  tar::validate(cfg);
  return cfg;
}

fs::path work_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (o.dataset.empty()) throw CLI::ValidationError("--out", "either --out or --dataset is required");
  return fs::path(o.dataset) / "work";
}

std::string method_name(const std::string& m) { return m == "tar" ? "tar_memory" : m; }

void print_reports(const std::vector<tar::MetricReport>& reports) { std::cout << tar::format_report_table(reports); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-assisted insight ranking toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Configuration file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Seed for every stochastic stage");
  };
  auto add_dataset = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--dataset", o.dataset, "Dataset directory");
    if (required) opt->required();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Work directory (default: <dataset>/work)"); };
  const std::vector<std::string> methods = {"tar", "tar_memory", "tar_semantics", "tar_cnn",
                                            "sig_table", "sig_dataset", "sig_cluster"};
  const std::vector<std::string> splits = {"train", "val", "test"};

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(synth);
  add_dataset(synth, true);

  auto* split = app.add_subcommand("split", "Write the seeded train/val/test manifest");
  add_common(split);
  add_dataset(split, true);

  auto* extract = app.add_subcommand("extract", "Extract insights from every table of the manifest");
  add_common(extract);
  add_dataset(extract, true);
  add_out(extract);

  auto* label = app.add_subcommand("label", "Compute gold scores from the texts of one split (default: all)");
  add_common(label);
  add_dataset(label, true);
  add_out(label);
  label->add_option("--split", o.split, "Split to label")->check(CLI::IsMember(splits));

  auto* trainc = app.add_subcommand("train", "Train a model variant");
  add_common(trainc);
  add_dataset(trainc, false);
  add_out(trainc);
  trainc->add_option("--method", o.method, "Model variant")
      ->default_val("tar")
      ->check(CLI::IsMember({"tar", "tar_memory", "tar_semantics", "tar_cnn"}));

  auto* rank = app.add_subcommand("rank", "Rank the insights of a split with a trained model");
  add_common(rank);
  add_dataset(rank, false);
  add_out(rank);
  rank->add_option("--method", o.method, "Model variant")
      ->default_val("tar")
      ->check(CLI::IsMember({"tar", "tar_memory", "tar_semantics", "tar_cnn"}));
  rank->add_option("--split", o.split, "Split to rank")->check(CLI::IsMember(splits));

  auto* baseline = app.add_subcommand("baseline", "Rank the insights of a split with a significance baseline");
  add_common(baseline);
  add_dataset(baseline, false);
  add_out(baseline);
  baseline->add_option("--method", o.method, "Baseline")->required()->check(
      CLI::IsMember({"sig_table", "sig_dataset", "sig_cluster"}));
  baseline->add_option("--split", o.split, "Split to rank")->check(CLI::IsMember(splits));
  baseline->add_option("--clusters", o.clusters, "Number of K-Means clusters for sig_cluster")
      ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Evaluate predictions against gold labels");
  add_common(eval);
  add_dataset(eval, false);
  add_out(eval);
  eval->add_option("--method", o.method, "Method to evaluate (default: every configured method)")
      ->check(CLI::IsMember(methods));
  eval->add_option("--split", o.split, "Split to evaluate")->check(CLI::IsMember(splits));
  eval->add_option("--k", o.k, "Single cutoff instead of the configured list")->check(CLI::PositiveNumber);

  auto* pipeline = app.add_subcommand("pipeline", "Run extract, label, train, rank, baselines and eval");
  add_common(pipeline);
  add_dataset(pipeline, true);
  add_out(pipeline);
  pipeline->add_option("--split", o.split, "Split to evaluate")->check(CLI::IsMember(splits));
  pipeline->add_option("--k", o.k, "Single cutoff instead of the configured list")->check(CLI::PositiveNumber);
  pipeline->add_option("--clusters", o.clusters, "Number of K-Means clusters for sig_cluster")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const auto cfg = resolve_config(o);
    if (*synth) {
      const auto n = tar::run_synth(cfg, o.dataset);
      std::cout << "wrote " << n << " tables to " << o.dataset << "\n";
    } else if (*split) {
      const auto m = tar::run_split(cfg, o.dataset);
      std::cout << "train " << m.train.size() << "  val " << m.val.size() << "  test " << m.test.size() << "\n";
    } else if (*extract) {
      const auto corpus = tar::run_extract(cfg, o.dataset, work_dir(o));
      std::size_t n = 0;
      for (const auto& t : corpus) n += t.size();
      std::cout << "extracted " << n << " insights from " << corpus.size() << " tables\n";
    } else if (*label) {
      std::vector<std::string> todo = o.split.empty() ? splits : std::vector<std::string>{o.split};
      for (const auto& s : todo) {
        const auto labeled = tar::run_label(cfg, o.dataset, work_dir(o), s);
        std::cout << "labeled " << labeled.size() << " " << s << " tables\n";
      }
    } else if (*trainc) {
      const auto v = tar::model_variant_from_string(method_name(o.method));
      const auto log = tar::run_train(cfg, work_dir(o), v);
      std::cout << "initial loss " << log.initial_train_loss << ", best val NDCG " << log.best_val_ndcg
                << " at epoch " << log.best_epoch << "\n";
    } else if (*rank) {
      const auto v = tar::model_variant_from_string(method_name(o.method));
      const auto ranked = tar::run_rank(cfg, work_dir(o), v, cfg.eval.split);
      std::cout << "ranked " << ranked.size() << " tables\n";
    } else if (*baseline) {
      const auto ranked =
          tar::run_baseline(cfg, work_dir(o), tar::baseline_method_from_string(o.method), cfg.eval.split);
      std::cout << "ranked " << ranked.size() << " tables\n";
    } else if (*eval) {
      const std::vector<std::string> ms = o.method.empty() ? cfg.methods : std::vector{method_name(o.method)};
      print_reports(tar::run_eval(cfg, work_dir(o), ms, cfg.eval.split));
    } else if (*pipeline) {
      print_reports(tar::run_pipeline(cfg, o.dataset, work_dir(o)).reports);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const tar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const tar::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
