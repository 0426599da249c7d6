#pragma once

// Point and shape insight extraction over table subspaces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tar/error.hpp"
#include "tar/stats.hpp"
#include "tar/table.hpp"
#include "tar/tokenize.hpp"

namespace tar {

enum class InsightType { PointOutstanding, ShapeIncreasing, ShapeDecreasing };

inline constexpr InsightType kAllInsightTypes[] = {InsightType::PointOutstanding, InsightType::ShapeIncreasing,
                                                   InsightType::ShapeDecreasing};

inline std::string_view to_string(InsightType t) {
  switch (t) {
    case InsightType::PointOutstanding: return "point_outstanding";
    case InsightType::ShapeIncreasing: return "shape_increasing";
    case InsightType::ShapeDecreasing: return "shape_decreasing";
  }
  return "unknown";
}

inline InsightType insight_type_from_string(std::string_view s) {
  for (InsightType t : kAllInsightTypes) {
    if (to_string(t) == s) return t;
  }
  throw DataError("unknown insight type '" + std::string(s) + "'");
}

inline bool is_shape(InsightType t) { return t != InsightType::PointOutstanding; }

// Series fed to the point scorer: raw cell values, or year-over-year change ratios.
enum class PointSeries { RawValues, ChangeRatio };

struct ExtractConfig {
  double threshold = 0.5;
  std::size_t min_len = 3;
  PointSeries point_series = PointSeries::RawValues;
};

struct Insight {
  std::string id;
  std::string table_id;
  Subspace subspace;
  InsightType itype = InsightType::PointOutstanding;
  double significance = 0.0;
  std::string description;
  std::optional<std::size_t> point_index;  // subspace cell of a point insight
};

// A series of tested values with the subspace cell each value belongs to.
struct TestSeries {
  std::vector<double> values;
  std::vector<std::size_t> cell;
};

// Change ratios need an ordered (integer-labelled) varying dimension; a zero
// previous value drops that point.
inline TestSeries point_test_series(const Subspace& s, PointSeries mode) {
  TestSeries out;
  if (mode == PointSeries::RawValues) {
    out.values = s.values;
    for (std::size_t i = 0; i < s.size(); ++i) out.cell.push_back(i);
    return out;
  }
  if (!labels_are_integers(s.labels)) return out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double prev = s.values[i - 1];
    if (prev == 0.0) continue;
    out.values.push_back((s.values[i] - prev) / std::fabs(prev));
    out.cell.push_back(i);
  }
  return out;
}

struct PointScore {
  std::size_t index = 0;  // into the scored series
  double significance = 0.0;
};

// Candidate = largest-magnitude value; the rest define a fitted normal and the
// significance is one minus the tail beyond the candidate.
inline std::optional<PointScore> score_point(std::span<const double> series) {
  if (series.size() < 3) return std::nullopt;
  std::size_t cand = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (std::fabs(series[i]) > std::fabs(series[cand])) cand = i;
  }
  std::vector<double> rest;
  rest.reserve(series.size() - 1);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i != cand) rest.push_back(series[i]);
  }
  const auto m = stats::sample_moments(rest);
  const double x = series[cand];
  if (m.stddev == 0.0) {
    if (x == m.mean) return std::nullopt;
    return PointScore{cand, 1.0};
  }
  const double z = std::fabs(x - m.mean) / m.stddev;
  return PointScore{cand, std::clamp(stats::normal_cdf(z), 0.0, 1.0)};
}

inline constexpr double kMinSlopePValue = 1e-12;

struct ShapeScore {
  InsightType itype = InsightType::ShapeIncreasing;
  double significance = 0.0;
};

inline std::optional<ShapeScore> score_shape(std::span<const double> series) {
  if (series.size() < 3) return std::nullopt;
  const auto fit = stats::fit_trend(series);
  if (fit.slope == 0.0) return std::nullopt;
  const double p = std::clamp(fit.p_value, kMinSlopePValue, 1.0);
  return ShapeScore{fit.slope > 0.0 ? InsightType::ShapeIncreasing : InsightType::ShapeDecreasing, 1.0 - p};
}

inline std::string measure_name(const Meta& meta) {
  auto it = meta.find("measure");
  if (it == meta.end() || it->second.empty()) return "Value";
  return it->second;
}

inline std::string render_description(const Subspace& s, InsightType itype, std::optional<std::size_t> point_index,
                                      std::string_view measure) {
  std::string out(measure.empty() ? std::string_view("Value") : measure);
  out += " of " + s.fixed_value();
  switch (itype) {
    case InsightType::ShapeIncreasing: return out + " is increasing year over year.";
    case InsightType::ShapeDecreasing: return out + " is decreasing year over year.";
    case InsightType::PointOutstanding:
      if (!point_index || *point_index >= s.size()) {
        throw std::invalid_argument("render_description: point insight needs a valid point index");
      }
      return out + " in " + s.labels[*point_index] + " is outstanding.";
  }
  return out;
}

inline std::optional<Insight> extract_point_insight(const Subspace& s, const ExtractConfig& cfg = {},
                                                    std::string_view measure = "Value") {
  if (s.size() < 3) return std::nullopt;
  const TestSeries series = point_test_series(s, cfg.point_series);
  const auto score = score_point(series.values);
  if (!score || score->significance < cfg.threshold) return std::nullopt;
  Insight ins;
  ins.subspace = s;
  ins.itype = InsightType::PointOutstanding;
  ins.significance = score->significance;
  ins.point_index = series.cell[score->index];
  ins.description = render_description(s, ins.itype, ins.point_index, measure);
  return ins;
}

// Shape insights need an ordered varying dimension (integer labels such as years).
inline std::optional<Insight> extract_shape_insight(const Subspace& s, const ExtractConfig& cfg = {},
                                                    std::string_view measure = "Value") {
  if (s.size() < 3 || !labels_are_integers(s.labels)) return std::nullopt;
  const auto score = score_shape(s.values);
  if (!score || score->significance < cfg.threshold) return std::nullopt;
  Insight ins;
  ins.subspace = s;
  ins.itype = score->itype;
  ins.significance = score->significance;
  ins.description = render_description(s, ins.itype, std::nullopt, measure);
  return ins;
}

inline std::vector<Insight> extract_all(const Table& table, const ExtractConfig& cfg = {}) {
  std::vector<Insight> out;
  const std::string measure = measure_name(table.meta);
  for (const Subspace& s : enumerate_subspaces(table, std::max<std::size_t>(cfg.min_len, 1))) {
    auto point = extract_point_insight(s, cfg, measure);
    auto shape = extract_shape_insight(s, cfg, measure);
    for (auto* found : {&point, &shape}) {
      if (!*found) continue;
      Insight ins = std::move(**found);
      ins.table_id = table.id;
      ins.id = table.id + "#" + std::to_string(out.size());
      out.push_back(std::move(ins));
    }
  }
  return out;
}

// Header of the insight: the fixed dimension value(s).
inline std::vector<std::string> header_tokens(const Insight& ins) { return tokenize(ins.subspace.fixed_value()); }

// Headers of all cells in the subspace: the fixed value plus every varying label.
inline std::vector<std::string> semantic_tokens(const Insight& ins) {
  std::vector<std::string> out = header_tokens(ins);
  for (const auto& label : ins.subspace.labels) {
    for (auto& tok : tokenize(label)) out.push_back(std::move(tok));
  }
  return out;
}

inline nlohmann::json to_json(const Insight& ins) {
  const Subspace& s = ins.subspace;
  nlohmann::json sub = {{"fixed_dim", s.fixed.empty() ? 0 : s.fixed_dim_index()},
                        {"fixed_value", s.fixed_value()},
                        {"varying_dim", s.varying_dim},
                        {"labels", s.labels},
                        {"values", s.values},
                        {"cell_indices", s.cell_indices}};
  if (s.fixed.size() > 1) {
    nlohmann::json fixed = nlohmann::json::array();
    for (const auto& [idx, v] : s.fixed) fixed.push_back({idx, v});
    sub["fixed"] = fixed;
  }
  nlohmann::json j = {{"id", ins.id},
                      {"table_id", ins.table_id},
                      {"subspace", sub},
                      {"type", to_string(ins.itype)},
                      {"significance", ins.significance},
                      {"description", ins.description}};
  if (ins.point_index) j["point_index"] = *ins.point_index;
  return j;
}

inline Insight insight_from_json(const nlohmann::json& j) {
  try {
    Insight ins;
    ins.id = j.at("id").get<std::string>();
    ins.table_id = j.at("table_id").get<std::string>();
    const auto& sub = j.at("subspace");
    Subspace& s = ins.subspace;
    if (sub.contains("fixed")) {
      for (const auto& f : sub["fixed"]) s.fixed.emplace_back(f.at(0).get<std::size_t>(), f.at(1).get<std::string>());
    } else {
      s.fixed.emplace_back(sub.at("fixed_dim").get<std::size_t>(), sub.at("fixed_value").get<std::string>());
    }
    s.varying_dim = sub.at("varying_dim").get<std::size_t>();
    s.labels = sub.at("labels").get<std::vector<std::string>>();
    s.values = sub.at("values").get<std::vector<double>>();
    if (sub.contains("cell_indices")) s.cell_indices = sub["cell_indices"].get<std::vector<std::size_t>>();
    if (s.labels.size() != s.values.size()) throw DataError("insight " + ins.id + ": labels/values length mismatch");
    ins.itype = insight_type_from_string(j.at("type").get<std::string>());
    ins.significance = j.at("significance").get<double>();
    ins.description = j.at("description").get<std::string>();
    if (j.contains("point_index")) ins.point_index = j["point_index"].get<std::size_t>();
    if (ins.significance < 0.0 || ins.significance > 1.0) {
      throw DataError("insight " + ins.id + ": significance outside [0, 1]");
    }
    if (ins.point_index.has_value() != (ins.itype == InsightType::PointOutstanding) ||
        (ins.point_index && *ins.point_index >= s.size())) {
      throw DataError("insight " + ins.id + ": point_index inconsistent with type");
    }
    if (ins.description.empty()) throw DataError("insight " + ins.id + ": empty description");
    return ins;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("insight record: ") + e.what());
  }
}

}  // namespace tar
