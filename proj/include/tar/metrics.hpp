#pragma once

// Ranking metrics: Precision@k, mAP@k, NDCG@k, and corpus aggregation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace tar {

struct RankingPair {
  std::string table_id;
  std::vector<std::string> predicted;       // best first
  std::map<std::string, double> gold;       // id -> gold score
};

// GoldTopK: the relevant set is the gold top-k. Threshold: the relevant set is
// every item with gold >= relevance_threshold (0/1 labels).
enum class RelevanceMode { GoldTopK, Threshold };

struct MetricConfig {
  RelevanceMode mode = RelevanceMode::GoldTopK;
  double relevance_threshold = 0.5;
};

namespace detail {

inline void check_pair(const RankingPair& p, std::size_t k) {
  if (p.predicted.size() != p.gold.size()) {
    throw std::invalid_argument("ranking " + p.table_id + ": prediction is not a permutation of the gold ids");
  }
  std::set<std::string> seen;
  for (const auto& id : p.predicted) {
    if (!p.gold.contains(id) || !seen.insert(id).second) {
      throw std::invalid_argument("ranking " + p.table_id + ": prediction is not a permutation of the gold ids");
    }
  }
  if (k < 1 || k > p.predicted.size()) {
    throw std::out_of_range("ranking " + p.table_id + ": k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(p.predicted.size()) + "]");
  }
}

}  // namespace detail

// Ids by descending gold score, ties by ascending id.
inline std::vector<std::string> gold_order(const RankingPair& p) {
  std::vector<std::pair<std::string, double>> items(p.gold.begin(), p.gold.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [id, g] : items) out.push_back(id);
  return out;
}

inline std::set<std::string> relevant_set(const RankingPair& p, std::size_t k, const MetricConfig& cfg = {}) {
  std::set<std::string> rel;
  if (cfg.mode == RelevanceMode::GoldTopK) {
    const auto order = gold_order(p);
    rel.insert(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, order.size())));
  } else {
    for (const auto& [id, g] : p.gold) {
      if (g >= cfg.relevance_threshold) rel.insert(id);
    }
  }
  return rel;
}

inline double precision_at_k(const RankingPair& p, std::size_t k, const MetricConfig& cfg = {}) {
  detail::check_pair(p, k);
  const auto rel = relevant_set(p, k, cfg);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += rel.contains(p.predicted[i]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

// Average precision over the top k; zero when nothing is relevant.
inline double average_precision_at_k(const RankingPair& p, std::size_t k, const MetricConfig& cfg = {}) {
  detail::check_pair(p, k);
  const auto rel = relevant_set(p, k, cfg);
  if (rel.empty()) return 0.0;
  double score = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!rel.contains(p.predicted[i])) continue;
    ++hits;
    score += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return score / static_cast<double>(std::min(k, rel.size()));
}

// Mean of per-table average precision.
inline double map_at_k(const std::vector<RankingPair>& pairs, std::size_t k, const MetricConfig& cfg = {}) {
  if (pairs.empty()) throw std::invalid_argument("map_at_k: no rankings");
  double s = 0.0;
  for (const auto& p : pairs) s += average_precision_at_k(p, k, cfg);
  return s / static_cast<double>(pairs.size());
}

inline double map_at_k(const RankingPair& p, std::size_t k, const MetricConfig& cfg = {}) {
  return average_precision_at_k(p, k, cfg);
}

// Exponential gain 2^g - 1 with log2(i + 1) discount; 1 when the ideal DCG is zero.
inline double ndcg_at_k(const RankingPair& p, std::size_t k) {
  detail::check_pair(p, k);
  auto dcg = [&](const std::vector<std::string>& order) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      s += (std::exp2(p.gold.at(order[i])) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
    }
    return s;
  };
  const double ideal = dcg(gold_order(p));
  if (ideal == 0.0) return 1.0;
  return dcg(p.predicted) / ideal;
}

struct MetricAtK {
  std::size_t k = 0;
  double precision = 0.0;
  double map = 0.0;
  double ndcg = 0.0;
  std::size_t tables = 0;   // tables with n >= k
  std::size_t skipped = 0;  // tables with n < k
};

struct MetricReport {
  std::string method;
  std::vector<MetricAtK> at;

  const MetricAtK& at_k(std::size_t k) const {
    for (const auto& m : at) {
      if (m.k == k) return m;
    }
    throw std::out_of_range("metric report has no k=" + std::to_string(k));
  }
};

inline MetricReport evaluate_corpus(const std::vector<RankingPair>& pairs, const std::vector<std::size_t>& ks,
                                    const MetricConfig& cfg = {}, std::string method = {}) {
  if (pairs.empty()) throw std::invalid_argument("evaluate_corpus: no rankings");
  MetricReport rep;
  rep.method = std::move(method);
  for (std::size_t k : ks) {
    MetricAtK m;
    m.k = k;
    for (const auto& p : pairs) {
      if (p.predicted.size() < k) {
        ++m.skipped;
        continue;
      }
      m.precision += precision_at_k(p, k, cfg);
      m.map += average_precision_at_k(p, k, cfg);
      m.ndcg += ndcg_at_k(p, k);
      ++m.tables;
    }
    if (m.tables > 0) {
      const double n = static_cast<double>(m.tables);
      m.precision /= n;
      m.map /= n;
      m.ndcg /= n;
    }
    rep.at.push_back(m);
  }
  return rep;
}

inline nlohmann::json to_json(const MetricReport& rep) {
  nlohmann::json at = nlohmann::json::array();
  for (const auto& m : rep.at) {
    at.push_back({{"k", m.k},
                  {"precision", m.precision},
                  {"map", m.map},
                  {"ndcg", m.ndcg},
                  {"tables", m.tables},
                  {"skipped", m.skipped}});
  }
  return {{"method", rep.method}, {"metrics", at}};
}

// Aligned console table: one row per method, Precision@k then mAP@k then NDCG@k columns.
inline std::string format_report_table(const std::vector<MetricReport>& reports) {
  if (reports.empty()) return {};
  std::vector<std::size_t> ks;
  for (const auto& m : reports.front().at) ks.push_back(m.k);
  std::size_t name_w = 6;
  for (const auto& r : reports) name_w = std::max(name_w, r.method.size());

  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(name_w)) << "method";
  for (const char* metric : {"Precision", "mAP", "NDCG"}) {
    for (std::size_t k : ks) os << "  " << std::right << std::setw(12) << (std::string(metric) + "@" + std::to_string(k));
  }
  os << '\n';
  os << std::fixed << std::setprecision(3);
  for (const auto& r : reports) {
    os << std::left << std::setw(static_cast<int>(name_w)) << r.method;
    for (int which = 0; which < 3; ++which) {
      for (std::size_t k : ks) {
        const auto& m = r.at_k(k);
        const double v = which == 0 ? m.precision : which == 1 ? m.map : m.ndcg;
        os << "  " << std::right << std::setw(12) << v;
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace tar
