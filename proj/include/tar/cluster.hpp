#pragma once

// TF-IDF header features and seeded K-Means (k-means++ seeding, Lloyd iterations).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tar/error.hpp"

namespace tar {

using Vec = std::vector<double>;

inline void l2_normalize(Vec& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  if (n == 0.0) return;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
}

// L2-normalized TF-IDF with smoothed idf ln((1 + N) / (1 + df)) + 1.
inline std::vector<Vec> tfidf_vectors(const std::vector<std::vector<std::string>>& docs) {
  std::map<std::string, std::size_t> index;
  for (const auto& d : docs) {
    for (const auto& t : d) index.try_emplace(t, 0);
  }
  std::size_t next = 0;
  for (auto& [t, i] : index) i = next++;
  std::vector<double> df(index.size(), 0.0);
  for (const auto& d : docs) {
    std::vector<bool> seen(index.size(), false);
    for (const auto& t : d) {
      const std::size_t i = index[t];
      if (!seen[i]) {
        seen[i] = true;
        df[i] += 1.0;
      }
    }
  }
  const double n = static_cast<double>(docs.size());
  std::vector<Vec> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    Vec v(index.size(), 0.0);
    for (const auto& t : d) v[index[t]] += 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) v[i] *= std::log((1.0 + n) / (1.0 + df[i])) + 1.0;
    }
    l2_normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

// Word vectors from a whitespace text file: "<token> v1 v2 ... vd" per line.
class EmbeddingTable {
 public:
  static EmbeddingTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open embedding file");
    EmbeddingTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ss(line);
      std::string tok;
      if (!(ss >> tok)) continue;
      Vec v;
      double x;
      while (ss >> x) v.push_back(x);
      if (v.empty() || (t.dim_ != 0 && v.size() != t.dim_)) {
        throw DataError(path + ":" + std::to_string(lineno) + ": inconsistent embedding dimension");
      }
      t.dim_ = v.size();
      t.vectors_[tok] = std::move(v);
    }
    if (t.dim_ == 0) throw DataError(path + ": no embeddings");
    return t;
  }

  void add(std::string token, Vec v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) throw std::invalid_argument("embedding dimension mismatch");
    vectors_[std::move(token)] = std::move(v);
  }

  std::size_t dim() const { return dim_; }

  // Mean of in-vocabulary token vectors, L2-normalized; zero when none are known.
  Vec embed(const std::vector<std::string>& tokens) const {
    Vec out(dim_, 0.0);
    for (const auto& t : tokens) {
      auto it = vectors_.find(t);
      if (it == vectors_.end()) continue;
      for (std::size_t i = 0; i < dim_; ++i) out[i] += it->second[i];
    }
    l2_normalize(out);
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::map<std::string, Vec> vectors_;
};

struct KMeansConfig {
  std::size_t k = 7;
  std::size_t restarts = 5;
  std::size_t max_iter = 100;
  std::uint64_t seed = 7;
};

struct ClusterModel {
  std::size_t k = 0;
  std::vector<Vec> centroids;
  std::vector<std::size_t> assignment;  // point index -> cluster
  double inertia = 0.0;
  std::vector<double> inertia_history;  // after each assignment step of the kept run
  std::size_t iterations = 0;
};

inline double squared_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

namespace detail {

inline std::size_t nearest(const Vec& p, const std::vector<Vec>& centroids, double* dist = nullptr) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  if (dist) *dist = bd;
  return best;
}

inline std::vector<Vec> kmeanspp_seed(const std::vector<Vec>& points, std::size_t k, std::mt19937_64& rng) {
  std::vector<Vec> centroids;
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  centroids.push_back(points[pick(rng)]);
  std::vector<double> d2(points.size());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest(points[i], centroids, &d2[i]);
      total += d2[i];
    }
    if (total == 0.0) {
      centroids.push_back(points[pick(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng);
    std::size_t chosen = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      target -= d2[i];
      if (target < 0.0) {
        chosen = i;
        break;
      }
    }
    centroids.push_back(points[chosen]);
  }
  return centroids;
}

}  // namespace detail

// Lloyd iterations from the given centroids until assignments stop changing.
// Empty clusters keep their previous centroid.
inline ClusterModel lloyd(const std::vector<Vec>& points, std::vector<Vec> centroids, std::size_t max_iter) {
  ClusterModel m;
  m.k = centroids.size();
  m.assignment.assign(points.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double d;
      const std::size_t c = detail::nearest(points[i], centroids, &d);
      inertia += d;
      if (c != m.assignment[i]) {
        m.assignment[i] = c;
        changed = true;
      }
    }
    m.inertia_history.push_back(inertia);
    m.inertia = inertia;
    m.iterations = it + 1;
    if (!changed) break;
    const std::size_t dim = points.front().size();
    std::vector<Vec> sums(m.k, Vec(dim, 0.0));
    std::vector<std::size_t> counts(m.k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      ++counts[m.assignment[i]];
      for (std::size_t j = 0; j < dim; ++j) sums[m.assignment[i]][j] += points[i][j];
    }
    for (std::size_t c = 0; c < m.k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
  }
  m.centroids = std::move(centroids);
  return m;
}

// Best-inertia run over `restarts` seeded k-means++ initializations.
inline ClusterModel kmeans(const std::vector<Vec>& points, const KMeansConfig& cfg) {
  if (cfg.k == 0) throw ConfigError("kmeans: k must be positive");
  if (cfg.k > points.size()) {
    throw ConfigError("kmeans: k=" + std::to_string(cfg.k) + " exceeds the " + std::to_string(points.size()) +
                      " points to cluster");
  }
  std::mt19937_64 rng(cfg.seed);
  ClusterModel best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(cfg.restarts, 1); ++r) {
    auto m = lloyd(points, detail::kmeanspp_seed(points, cfg.k, rng), cfg.max_iter);
    if (!have || m.inertia < best.inertia) {
      best = std::move(m);
      have = true;
    }
  }
  return best;
}

}  // namespace tar
