#pragma once

// Rule-based significance rankers. Each insight's statistic is compared against
// a reference distribution pooled over a group of insights: its own table
// (Sig_table), the whole corpus (Sig_dataset), or its header cluster (Sig_cluster).
//
// Point insights: statistic = the candidate value of the tested series; the
// reference is every tested-series value of the pool's point insights minus the
// candidate itself. Shape insights: statistic = OLS slope divided by the mean
// absolute value of the series; the reference is the same statistic of every
// other shape insight in the pool. Significance = Phi(|x - mu| / sigma).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tar/cluster.hpp"
#include "tar/insight.hpp"
#include "tar/model.hpp"
#include "tar/stats.hpp"

namespace tar {

enum class BaselineMethod { SigTable, SigDataset, SigCluster };

inline std::string_view to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::SigTable: return "sig_table";
    case BaselineMethod::SigDataset: return "sig_dataset";
    case BaselineMethod::SigCluster: return "sig_cluster";
  }
  return "unknown";
}

struct BaselineConfig {
  PointSeries point_series = PointSeries::RawValues;
  KMeansConfig kmeans;                   // k defaults to 7
  std::optional<std::string> embedding_path;  // word vectors instead of TF-IDF
};

// Grouped by table, in input order.
using Corpus = std::vector<std::vector<Insight>>;

struct InsightStatistic {
  bool point = true;
  double value = 0.0;
  std::vector<double> series;  // point: tested series (candidate included)
  std::size_t candidate = 0;   // point: index of the candidate in `series`
  double own_significance = 0.0;
};

inline InsightStatistic insight_statistic(const Insight& ins, PointSeries mode) {
  InsightStatistic st;
  st.own_significance = ins.significance;
  if (ins.itype == InsightType::PointOutstanding) {
    const TestSeries ts = point_test_series(ins.subspace, mode);
    st.series = ts.values;
    const auto score = score_point(ts.values);
    if (score) {
      st.candidate = score->index;
      st.value = ts.values[score->index];
    } else if (ins.point_index) {
      for (std::size_t i = 0; i < ts.cell.size(); ++i) {
        if (ts.cell[i] == *ins.point_index) {
          st.candidate = i;
          st.value = ts.values[i];
        }
      }
    }
    return st;
  }
  st.point = false;
  const auto& v = ins.subspace.values;
  if (v.size() >= 3) {
    double level = 0.0;
    for (double x : v) level += std::fabs(x);
    level /= static_cast<double>(v.size());
    const double slope = stats::fit_trend(v).slope;
    st.value = level > 0.0 ? slope / level : 0.0;
  }
  return st;
}

namespace detail {

// Running count / mean / M2 with removal of one observation.
struct Moments {
  double n = 0.0, mean = 0.0, m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  Moments without(double x) const {
    Moments r;
    r.n = n - 1.0;
    if (r.n <= 0.0) return Moments{};
    r.mean = (n * mean - x) / r.n;
    r.m2 = std::max(0.0, m2 - (x - r.mean) * (x - mean));
    return r;
  }

  double stddev() const { return n >= 2.0 ? std::sqrt(m2 / (n - 1.0)) : 0.0; }
};

inline double tail_significance(double x, const Moments& ref) {
  const double sd = ref.stddev();
  if (sd == 0.0) return x == ref.mean ? 0.0 : 1.0;
  return std::clamp(stats::normal_cdf(std::fabs(x - ref.mean) / sd), 0.0, 1.0);
}

}  // namespace detail

// Significance of every insight against the reference distribution of its pool.
// `pool_of[t][i]` names the pool of insight i of table t.
inline std::vector<std::vector<double>> pooled_significance(const Corpus& corpus,
                                                            const std::vector<std::vector<std::size_t>>& pool_of,
                                                            PointSeries mode) {
  std::size_t pools = 0;
  for (const auto& t : pool_of) {
    for (std::size_t p : t) pools = std::max(pools, p + 1);
  }
  std::vector<std::vector<InsightStatistic>> stat(corpus.size());
  std::vector<detail::Moments> point_ref(pools), shape_ref(pools);
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    for (std::size_t i = 0; i < corpus[t].size(); ++i) {
      stat[t].push_back(insight_statistic(corpus[t][i], mode));
      const auto& st = stat[t].back();
      const std::size_t p = pool_of[t][i];
      if (st.point) {
        for (double x : st.series) point_ref[p].add(x);
      } else {
        shape_ref[p].add(st.value);
      }
    }
  }
  std::vector<std::vector<double>> out(corpus.size());
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    for (std::size_t i = 0; i < corpus[t].size(); ++i) {
      const auto& st = stat[t][i];
      const std::size_t p = pool_of[t][i];
      double sig;
      if (st.point) {
        sig = st.series.empty() ? st.own_significance : detail::tail_significance(st.value, point_ref[p].without(st.value));
      } else {
        const auto ref = shape_ref[p].without(st.value);
        sig = ref.n < 2.0 ? st.own_significance : detail::tail_significance(st.value, ref);
      }
      out[t].push_back(sig);
    }
  }
  return out;
}

inline std::vector<std::vector<RankedPrediction>> rank_by_significance(const Corpus& corpus,
                                                                       const std::vector<std::vector<double>>& sig) {
  std::vector<std::vector<RankedPrediction>> out;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    std::vector<std::string> ids;
    for (const auto& ins : corpus[t]) ids.push_back(ins.id);
    out.push_back(rank_by_scores(corpus[t].empty() ? std::string() : corpus[t].front().table_id, ids, sig[t]));
  }
  return out;
}

inline std::vector<std::vector<double>> table_significance(const Corpus& corpus, const BaselineConfig& cfg = {}) {
  std::vector<std::vector<std::size_t>> pool(corpus.size());
  for (std::size_t t = 0; t < corpus.size(); ++t) pool[t].assign(corpus[t].size(), t);
  return pooled_significance(corpus, pool, cfg.point_series);
}

inline std::vector<std::vector<double>> dataset_significance(const Corpus& corpus, const BaselineConfig& cfg = {}) {
  std::vector<std::vector<std::size_t>> pool(corpus.size());
  for (std::size_t t = 0; t < corpus.size(); ++t) pool[t].assign(corpus[t].size(), 0);
  return pooled_significance(corpus, pool, cfg.point_series);
}

// Header feature per insight in corpus order (tables, then insights).
inline std::vector<Vec> header_features(const Corpus& corpus, const BaselineConfig& cfg = {}) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : corpus) {
    for (const auto& ins : t) docs.push_back(header_tokens(ins));
  }
  if (cfg.embedding_path) {
    const auto table = EmbeddingTable::load(*cfg.embedding_path);
    std::vector<Vec> out;
    for (const auto& d : docs) out.push_back(table.embed(d));
    return out;
  }
  return tfidf_vectors(docs);
}

inline ClusterModel cluster_insights(const Corpus& corpus, const BaselineConfig& cfg = {}) {
  return kmeans(header_features(corpus, cfg), cfg.kmeans);
}

inline std::vector<std::vector<double>> cluster_significance(const Corpus& corpus, const ClusterModel& clusters,
                                                             const BaselineConfig& cfg = {}) {
  std::vector<std::vector<std::size_t>> pool(corpus.size());
  std::size_t flat = 0;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    for (std::size_t i = 0; i < corpus[t].size(); ++i) pool[t].push_back(clusters.assignment.at(flat++));
  }
  return pooled_significance(corpus, pool, cfg.point_series);
}

inline std::vector<std::vector<double>> cluster_significance(const Corpus& corpus, const BaselineConfig& cfg = {}) {
  return cluster_significance(corpus, cluster_insights(corpus, cfg), cfg);
}

inline std::vector<RankedPrediction> rank_sig_table(const std::vector<Insight>& table, const BaselineConfig& cfg = {}) {
  const Corpus corpus{table};
  return rank_by_significance(corpus, table_significance(corpus, cfg)).front();
}

inline std::vector<std::vector<RankedPrediction>> rank_sig_dataset(const Corpus& corpus, const BaselineConfig& cfg = {}) {
  return rank_by_significance(corpus, dataset_significance(corpus, cfg));
}

inline std::vector<std::vector<RankedPrediction>> rank_sig_cluster(const Corpus& corpus, const BaselineConfig& cfg = {}) {
  return rank_by_significance(corpus, cluster_significance(corpus, cfg));
}

inline std::vector<std::vector<RankedPrediction>> rank_baseline(BaselineMethod method, const Corpus& corpus,
                                                                const BaselineConfig& cfg = {}) {
  switch (method) {
    case BaselineMethod::SigTable: return rank_by_significance(corpus, table_significance(corpus, cfg));
    case BaselineMethod::SigDataset: return rank_sig_dataset(corpus, cfg);
    case BaselineMethod::SigCluster: return rank_sig_cluster(corpus, cfg);
  }
  return {};
}

}  // namespace tar
