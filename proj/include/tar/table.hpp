#pragma once

// Multi-dimensional tables, subspace enumeration and table/document ingestion.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tar/error.hpp"

namespace tar {

using Meta = std::map<std::string, std::string>;

struct Cell {
  std::vector<std::string> dims;
  double value = 0.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Table {
  std::string id;
  std::vector<std::string> dim_names;
  std::vector<Cell> cells;
  Meta meta;

  std::size_t dim_count() const { return dim_names.size(); }

  friend bool operator==(const Table&, const Table&) = default;
};

// Cells sharing every dimension but `varying_dim`, sorted along it.
struct Subspace {
  std::vector<std::pair<std::size_t, std::string>> fixed;  // (dim index, value), ascending index
  std::size_t varying_dim = 0;
  std::vector<std::size_t> cell_indices;  // into Table::cells
  std::vector<std::string> labels;        // varying-dimension label per cell
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::size_t fixed_dim_index() const { return fixed.front().first; }

  // Space-joined fixed values; the single fixed value for bi-dimensional tables.
  std::string fixed_value() const {
    std::string out;
    for (const auto& [idx, v] : fixed) {
      if (!out.empty()) out += ' ';
      out += v;
    }
    return out;
  }

  friend bool operator==(const Subspace&, const Subspace&) = default;
};

struct DocumentText {
  std::string table_id;
  std::vector<std::string> sentences;
  Meta meta;
};

namespace detail {

inline std::optional<long long> parse_integer(std::string_view s) {
  if (s.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

// Integer labels sort numerically; if any label is non-integer the whole set
// sorts lexicographically.
inline bool labels_are_integers(const std::vector<std::string>& labels) {
  return std::all_of(labels.begin(), labels.end(),
                     [](const std::string& l) { return detail::parse_integer(l).has_value(); });
}

inline void sort_labels(std::vector<std::string>& labels) {
  if (labels_are_integers(labels)) {
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return *detail::parse_integer(a) < *detail::parse_integer(b);
    });
  } else {
    std::sort(labels.begin(), labels.end());
  }
}

inline void validate_table(const Table& t) {
  if (t.id.empty()) throw DataError("table: empty id");
  if (t.dim_names.empty()) throw DataError("table " + t.id + ": no dimensions");
  if (t.cells.empty()) throw DataError("table " + t.id + ": table has no cells");
  std::set<std::vector<std::string>> seen;
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    const Cell& c = t.cells[i];
    if (c.dims.size() != t.dim_names.size()) {
      throw DataError("table " + t.id + ": cells[" + std::to_string(i) + "] has " +
                      std::to_string(c.dims.size()) + " dimension labels, expected " +
                      std::to_string(t.dim_names.size()));
    }
    if (!std::isfinite(c.value)) {
      throw DataError("table " + t.id + ": cells[" + std::to_string(i) + "].value is not finite");
    }
    if (!seen.insert(c.dims).second) {
      std::string key;
      for (const auto& d : c.dims) key += (key.empty() ? "" : ", ") + d;
      throw DataError("table " + t.id + ": duplicate cell (" + key + ")");
    }
  }
}

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json cells = nlohmann::json::array();
  for (const Cell& c : t.cells) cells.push_back({{"dims", c.dims}, {"value", c.value}});
  return {{"id", t.id}, {"dim_names", t.dim_names}, {"cells", cells}, {"meta", t.meta}};
}

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(where + ": missing field '" + key + "'");
  return *it;
}

inline Meta meta_from_json(const nlohmann::json& j, const std::string& where) {
  Meta meta;
  if (!j.is_object()) throw DataError(where + ".meta: expected object");
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      meta[k] = v.get<std::string>();
    } else if (v.is_number_integer()) {
      meta[k] = std::to_string(v.get<long long>());
    } else if (v.is_number()) {
      std::ostringstream os;
      os << v.get<double>();
      meta[k] = os.str();
    } else {
      throw DataError(where + ".meta." + k + ": expected string or number");
    }
  }
  return meta;
}

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

}  // namespace detail

inline Table table_from_json(const nlohmann::json& j, const std::string& where = "table") {
  if (!j.is_object()) throw DataError(where + ": expected object");
  Table t;
  try {
    t.id = detail::require(j, "id", where).get<std::string>();
    t.dim_names = detail::require(j, "dim_names", where).get<std::vector<std::string>>();
  } catch (const nlohmann::json::type_error& e) {
    throw DataError(where + ": " + e.what());
  }
  if (j.contains("meta")) t.meta = detail::meta_from_json(j["meta"], where);
  const auto& cells = detail::require(j, "cells", where);
  if (!cells.is_array()) throw DataError(where + ".cells: expected array");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string at = where + ".cells[" + std::to_string(i) + "]";
    const auto& cj = cells[i];
    if (!cj.is_object()) throw DataError(at + ": expected object");
    Cell c;
    const auto& dims = detail::require(cj, "dims", at);
    if (!dims.is_array()) throw DataError(at + ".dims: expected array");
    for (const auto& d : dims) {
      if (d.is_string()) {
        c.dims.push_back(d.get<std::string>());
      } else if (d.is_number_integer()) {
        c.dims.push_back(std::to_string(d.get<long long>()));
      } else {
        throw DataError(at + ".dims: labels must be strings or integers");
      }
    }
    const auto& v = detail::require(cj, "value", at);
    if (!v.is_number()) throw DataError(at + ".value: expected number");
    c.value = v.get<double>();
    t.cells.push_back(std::move(c));
  }
  validate_table(t);
  return t;
}

inline Table load_table(const std::string& path) {
  return table_from_json(detail::parse_file(path), path);
}

inline void save_table(const Table& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot write file");
  out << to_json(t).dump(2) << '\n';
}

// Every subspace obtained by fixing all dimensions but one; order is by fixed
// dimension index, then fixed values (label ordering rule), then varying index.
inline std::vector<Subspace> enumerate_subspaces(const Table& table, std::size_t min_len = 3) {
  std::vector<Subspace> out;
  const std::size_t d = table.dim_count();
  if (d < 2) return out;

  // Per-dimension rank of each label under the ordering rule.
  std::vector<std::map<std::string, std::size_t>> rank(d);
  for (std::size_t k = 0; k < d; ++k) {
    std::set<std::string> uniq;
    for (const Cell& c : table.cells) uniq.insert(c.dims[k]);
    std::vector<std::string> labels(uniq.begin(), uniq.end());
    sort_labels(labels);
    for (std::size_t i = 0; i < labels.size(); ++i) rank[k][labels[i]] = i;
  }

  for (std::size_t vary = 0; vary < d; ++vary) {
    // key: ranks of the fixed dims in ascending dim order
    std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
    for (std::size_t ci = 0; ci < table.cells.size(); ++ci) {
      std::vector<std::size_t> key;
      for (std::size_t k = 0; k < d; ++k) {
        if (k != vary) key.push_back(rank[k].at(table.cells[ci].dims[k]));
      }
      groups[key].push_back(ci);
    }
    for (auto& [key, members] : groups) {
      if (members.size() < min_len) continue;
      std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        return rank[vary].at(table.cells[a].dims[vary]) < rank[vary].at(table.cells[b].dims[vary]);
      });
      Subspace s;
      s.varying_dim = vary;
      const Cell& first = table.cells[members.front()];
      for (std::size_t k = 0; k < d; ++k) {
        if (k != vary) s.fixed.emplace_back(k, first.dims[k]);
      }
      for (std::size_t ci : members) {
        s.cell_indices.push_back(ci);
        s.labels.push_back(table.cells[ci].dims[vary]);
        s.values.push_back(table.cells[ci].value);
      }
      out.push_back(std::move(s));
    }
  }

  auto sort_key = [&](const Subspace& s) {
    std::vector<std::size_t> k;
    k.push_back(s.fixed_dim_index());
    for (const auto& [idx, v] : s.fixed) k.push_back(rank[idx].at(v));
    k.push_back(s.varying_dim);
    return k;
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const Subspace& a, const Subspace& b) { return sort_key(a) < sort_key(b); });
  return out;
}

// Splits on '.', '!' or '?' followed by whitespace or end of text. A period
// inside a number ("71.7") is never followed by whitespace and so never splits.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto is_space = [](char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; };
  auto push = [&](std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    if (e > b) out.emplace_back(s.substr(b, e - b));
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_end = i + 1 == text.size();
    if (at_end || is_space(text[i + 1])) {
      push(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < text.size()) push(text.substr(start));
  return out;
}

inline DocumentText document_from_json(const nlohmann::json& j, const std::string& where = "document") {
  if (!j.is_object()) throw DataError(where + ": expected object");
  DocumentText doc;
  auto it = j.find("table_id");
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw DataError(where + ": missing table_id");
  }
  doc.table_id = it->get<std::string>();
  if (j.contains("meta")) doc.meta = detail::meta_from_json(j["meta"], where);
  const auto& text = detail::require(j, "text", where);
  if (!text.is_string()) throw DataError(where + ".text: expected string");
  doc.sentences = split_sentences(text.get<std::string>());
  return doc;
}

inline DocumentText load_document(const std::string& path) {
  return document_from_json(detail::parse_file(path), path);
}

// The serialized form keeps the original text; sentences are rejoined with a space.
inline nlohmann::json to_json(const DocumentText& doc) {
  std::string text;
  for (const auto& s : doc.sentences) text += (text.empty() ? "" : " ") + s;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : doc.meta) {
    if (auto n = detail::parse_integer(v)) {
      meta[k] = *n;
    } else {
      meta[k] = v;
    }
  }
  return {{"table_id", doc.table_id}, {"meta", meta}, {"text", text}};
}

inline std::optional<int> report_year(const Meta& meta) {
  auto it = meta.find("report_year");
  if (it == meta.end()) return std::nullopt;
  if (auto v = detail::parse_integer(it->second)) return static_cast<int>(*v);
  return std::nullopt;
}

}  // namespace tar
