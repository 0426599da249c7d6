#pragma once

// Weak supervision: description-sentence similarity as the importance label.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tar/insight.hpp"
#include "tar/table.hpp"
#include "tar/tokenize.hpp"

namespace tar {

using Tokens = std::vector<std::string>;

// How shared words are counted. Multiset clips each word at the smaller of its
// two counts; DistinctTypes counts each shared word once. Both keep Sim_s <= 1.
enum class CountMode { Multiset, DistinctTypes };

struct TextConfig {
  std::size_t min_chars = 50;
  std::size_t min_tokens = 10;
  std::vector<std::string> keywords = {"increase", "increased", "increasing", "decrease", "decreased",
                                       "decreasing", "million",  "billion",    "percent",  "growth",
                                       "decline",   "outstanding"};
  double sentence_weight = 0.5;
  double header_weight = 0.5;
  CountMode count_mode = CountMode::Multiset;
};

struct TokenizedSentence {
  std::string raw;
  Tokens tokens;
  bool has_number = false;
};

struct LabeledInsight {
  Insight insight;
  double gold_score = 0.0;
  std::optional<std::size_t> best_sentence_index;
  std::size_t gold_rank = 0;
};

namespace detail {

inline bool is_month(std::string_view t) {
  static const std::set<std::string, std::less<>> months = {
      "january", "february", "march",     "april",   "may",      "june",     "july",
      "august",  "september", "october",  "november", "december"};
  return months.contains(t);
}

}  // namespace detail

// Tokenizes and rewrites year mentions relative to the report year: the report
// year becomes "this year", the year before "last year". Month-day dates are
// removed.
inline Tokens normalize_text(std::string_view text, std::optional<int> report_year) {
  Tokens raw = tokenize(text);
  Tokens out;
  out.reserve(raw.size() + 2);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string& t = raw[i];
    if (detail::is_month(t)) {
      if (i + 1 < raw.size() && raw[i + 1].size() <= 2 && detail::parse_integer(raw[i + 1])) ++i;
      continue;
    }
    if (report_year) {
      if (auto y = detail::parse_integer(t)) {
        if (*y == *report_year) {
          out.insert(out.end(), {"this", "year"});
          continue;
        }
        if (*y == *report_year - 1) {
          out.insert(out.end(), {"last", "year"});
          continue;
        }
      }
    }
    out.push_back(t);
  }
  return out;
}

// Keeps sentences of at least `min_chars` characters and `min_tokens` words that
// mention a number or a keyword; `extra_keywords` are typically the table's header words.
inline std::vector<TokenizedSentence> preprocess(const DocumentText& doc, const TextConfig& cfg = {},
                                                 const std::vector<std::string>& extra_keywords = {}) {
  std::set<std::string, std::less<>> keywords(cfg.keywords.begin(), cfg.keywords.end());
  keywords.insert(extra_keywords.begin(), extra_keywords.end());
  const auto year = report_year(doc.meta);

  std::vector<TokenizedSentence> out;
  for (const std::string& raw : doc.sentences) {
    if (raw.size() < cfg.min_chars) continue;
    const Tokens words = tokenize(raw);
    if (words.size() < cfg.min_tokens) continue;
    const bool number = has_digit(raw);
    const bool keyword = std::any_of(words.begin(), words.end(), [&](const std::string& w) { return keywords.contains(w); });
    if (!number && !keyword) continue;
    TokenizedSentence ts{raw, normalize_text(raw, year), number};
    if (ts.tokens.empty()) continue;
    out.push_back(std::move(ts));
  }
  return out;
}

inline std::size_t count_shared(const Tokens& a, const Tokens& b, CountMode mode = CountMode::Multiset) {
  std::map<std::string_view, std::size_t> ca, cb;
  for (const auto& t : a) ++ca[t];
  for (const auto& t : b) ++cb[t];
  std::size_t n = 0;
  for (const auto& [w, k] : ca) {
    auto it = cb.find(w);
    if (it == cb.end()) continue;
    n += mode == CountMode::Multiset ? std::min(k, it->second) : 1;
  }
  return n;
}

// Count^2 / (|d| |s|).
inline double sim_sentence(const Tokens& d, const Tokens& s, CountMode mode = CountMode::Multiset) {
  if (d.empty() || s.empty()) throw std::invalid_argument("sim_sentence: empty token list");
  const double c = static_cast<double>(count_shared(d, s, mode));
  return c * c / (static_cast<double>(d.size()) * static_cast<double>(s.size()));
}

// (Count(h,s)/|h|) * (Count(h,s) / max_k Count(h_k,s)); zero when no header matches.
inline double sim_header(const Tokens& h, const Tokens& s, const std::vector<Tokens>& all_headers,
                         CountMode mode = CountMode::Multiset) {
  if (h.empty()) return 0.0;
  const double c = static_cast<double>(count_shared(h, s, mode));
  double best = c;
  for (const Tokens& other : all_headers) best = std::max(best, static_cast<double>(count_shared(other, s, mode)));
  if (best == 0.0) return 0.0;
  return (c / static_cast<double>(h.size())) * (c / best);
}

inline double sim_combined(const Tokens& d, const Tokens& h, const Tokens& s, const std::vector<Tokens>& all_headers,
                           const TextConfig& cfg = {}) {
  return cfg.sentence_weight * sim_sentence(d, s, cfg.count_mode) +
         cfg.header_weight * sim_header(h, s, all_headers, cfg.count_mode);
}

// Assigns 1..n by descending gold score, ties broken by ascending id.
inline void assign_gold_ranks(std::vector<LabeledInsight>& labeled) {
  std::vector<std::size_t> order(labeled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (labeled[a].gold_score != labeled[b].gold_score) return labeled[a].gold_score > labeled[b].gold_score;
    return labeled[a].insight.id < labeled[b].insight.id;
  });
  for (std::size_t r = 0; r < order.size(); ++r) labeled[order[r]].gold_rank = r + 1;
}

// Gold score of each insight = best combined similarity over the sentences.
// All insights must come from one table; their headers form the competing set.
inline std::vector<LabeledInsight> label_insights(const std::vector<Insight>& insights,
                                                  const std::vector<TokenizedSentence>& sentences,
                                                  const TextConfig& cfg = {},
                                                  std::optional<int> report_year = std::nullopt) {
  std::vector<Tokens> headers;
  headers.reserve(insights.size());
  for (const Insight& ins : insights) headers.push_back(header_tokens(ins));

  std::vector<LabeledInsight> out;
  out.reserve(insights.size());
  for (std::size_t i = 0; i < insights.size(); ++i) {
    LabeledInsight li{insights[i], 0.0, std::nullopt, 0};
    const Tokens d = normalize_text(insights[i].description, report_year);
    if (!d.empty()) {
      for (std::size_t j = 0; j < sentences.size(); ++j) {
        const double sim = sim_combined(d, headers[i], sentences[j].tokens, headers, cfg);
        if (!li.best_sentence_index || sim > li.gold_score) {
          li.gold_score = sim;
          li.best_sentence_index = j;
        }
      }
    }
    out.push_back(std::move(li));
  }
  assign_gold_ranks(out);
  return out;
}

// Lower/upper boundaries splitting gold scores into three equal-count groups.
inline std::pair<double, double> tercile_boundaries(std::vector<double> scores) {
  if (scores.empty()) return {0.0, 0.0};
  std::sort(scores.begin(), scores.end());
  const std::size_t n = scores.size();
  return {scores[n / 3], scores[(2 * n) / 3]};
}

inline nlohmann::json to_json(const LabeledInsight& li) {
  nlohmann::json j = to_json(li.insight);
  j["gold_score"] = li.gold_score;
  j["gold_rank"] = li.gold_rank;
  j["best_sentence_index"] = li.best_sentence_index ? nlohmann::json(*li.best_sentence_index) : nlohmann::json();
  return j;
}

inline LabeledInsight labeled_insight_from_json(const nlohmann::json& j) {
  LabeledInsight li;
  li.insight = insight_from_json(j);
  try {
    li.gold_score = j.at("gold_score").get<double>();
    li.gold_rank = j.at("gold_rank").get<std::size_t>();
    if (j.contains("best_sentence_index") && !j["best_sentence_index"].is_null()) {
      li.best_sentence_index = j["best_sentence_index"].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("labeled insight " + li.insight.id + ": " + e.what());
  }
  return li;
}

}  // namespace tar
