#pragma once

// Synthetic financial-style corpus: item x year tables with planted trends and
// outliers, and a companion text that verbalizes every insight of the important
// items. Importance mixes header semantics (a fixed popularity per line item)
// with table context: a trend against the table's majority direction, an
// outlier in the item, or an outlier in a related item (same group token).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tar/error.hpp"
#include "tar/insight.hpp"
#include "tar/table.hpp"

namespace tar {

struct SynthConfig {
  std::size_t tables = 100;
  std::uint64_t seed = 1;
  std::size_t min_items = 6;
  std::size_t max_items = 10;
  std::size_t years = 6;
  int first_year_min = 2008;
  int first_year_max = 2014;
  double noise = 0.0;              // paraphrase noise level in [0, 1]
  double increasing_share = 0.5;   // probability a table's majority direction is increasing
  double follow_majority = 0.8;    // probability an item follows the majority direction
  double spike_prob = 0.15;
  double popularity_weight = 1.0;
  double context_weight = 1.0;
  double spike_weight = 1.0;
  double group_weight = 1.0;  // bonus when a related item of the same table spikes
  double importance_jitter = 0.0;
  double importance_threshold = 1.0;  // items at or above it are verbalized (at least one per table)
  std::size_t filler_sentences = 2;
  std::string measure = "Reported annual amount";
};

inline void validate(const SynthConfig& c) {
  if (c.tables == 0) throw ConfigError("synth: tables must be positive");
  if (c.min_items == 0 || c.min_items > c.max_items) throw ConfigError("synth: need 0 < min_items <= max_items");
  if (c.years < 4) throw ConfigError("synth: years must be at least 4");
  if (c.first_year_min > c.first_year_max) throw ConfigError("synth: first_year_min > first_year_max");
  if (c.noise < 0.0 || c.noise > 1.0) throw ConfigError("synth: noise must lie in [0, 1]");
  for (double p : {c.increasing_share, c.follow_majority, c.spike_prob}) {
    if (p < 0.0 || p > 1.0) throw ConfigError("synth: probabilities must lie in [0, 1]");
  }
}

struct LineItem {
  const char* name;
  const char* group;  // shared header token of related items
  double popularity;
};

// Item names avoid the template words ("of", "in", "is", "year") so that each
// item's header is the best header match for its own sentences.
inline const std::vector<LineItem>& line_items() {
  static const std::vector<LineItem> items = {
      {"total net revenue", "revenue", 1.0},
      {"product revenue", "revenue", 0.30},
      {"license revenue", "revenue", 0.20},
      {"deferred revenue", "revenue", 0.10},
      {"service revenue", "revenue", 0.05},
      {"total operating expenses", "expenses", 1.0},
      {"research and development expenses", "expenses", 0.40},
      {"general and administrative expenses", "expenses", 0.25},
      {"sales and marketing expenses", "expenses", 0.15},
      {"interest expenses", "expenses", 0.05},
      {"net income", "income", 1.0},
      {"operating income", "income", 0.35},
      {"interest income", "income", 0.15},
      {"other income", "income", 0.05},
      {"free cash flow", "cash", 1.0},
      {"cash equivalents", "cash", 0.30},
      {"operating cash flow", "cash", 0.20},
      {"restricted cash", "cash", 0.05},
      {"total assets", "assets", 0.45},
      {"current assets", "assets", 0.25},
      {"intangible assets", "assets", 0.10},
      {"fixed assets", "assets", 0.05},
  };
  return items;
}

struct SynthTable {
  Table table;
  DocumentText document;
  std::string text;
  std::vector<std::string> important_items;  // verbalized, most important first
};

inline ExtractConfig synth_extract_config() {
  ExtractConfig c;
  c.point_series = PointSeries::ChangeRatio;
  return c;
}

namespace detail {

inline std::string paraphrase(const std::string& sentence, double noise, std::mt19937_64& rng) {
  if (noise <= 0.0) return sentence;
  static const std::map<std::string, std::vector<std::string>> synonyms = {
      {"increasing", {"rising", "growing"}},   {"decreasing", {"declining", "falling"}},
      {"outstanding", {"remarkable", "notable"}}, {"amount", {"value", "figure"}},
      {"Reported", {"Recorded", "Stated"}},    {"annual", {"yearly"}},
  };
  static const std::vector<std::string> fillers = {"notably", "overall", "again", "clearly"};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::istringstream in(sentence);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string word = words[i];
    std::string core = word;
    std::string tail;
    while (!core.empty() && (core.back() == '.' || core.back() == ',')) {
      tail.insert(tail.begin(), core.back());
      core.pop_back();
    }
    auto it = synonyms.find(core);
    if (it != synonyms.end() && u(rng) < noise) {
      std::uniform_int_distribution<std::size_t> pick(0, it->second.size() - 1);
      word = it->second[pick(rng)] + tail;
    }
    if (i > 0 && u(rng) < noise * 0.25) {
      std::uniform_int_distribution<std::size_t> pick(0, fillers.size() - 1);
      out.push_back(fillers[pick(rng)]);
    }
    out.push_back(word);
  }
  std::string s;
  for (const auto& x : out) s += (s.empty() ? "" : " ") + x;
  return s;
}

inline std::string filler_sentence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n1(40, 900), n2(5, 80), pick(0, 3);
  std::ostringstream os;
  switch (pick(rng)) {
    case 0:
      os << "We had " << n1(rng) << " full-time employees including " << n2(rng)
         << " employees engaged in development.";
      break;
    case 1:
      os << "The company operates " << n2(rng) << " facilities across " << n2(rng)
         << " countries and serves many customers.";
      break;
    case 2:
      os << "Management believes that current resources will be sufficient for at least " << n2(rng)
         << " months.";
      break;
    default:
      os << "The board approved a repurchase program of up to " << n1(rng) << " thousand shares during the period.";
      break;
  }
  return os.str();
}

}  // namespace detail

inline SynthTable generate_table(const SynthConfig& cfg, std::size_t index, std::mt19937_64& rng) {
  const auto& pool = line_items();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> n_items_dist(cfg.min_items, std::min(cfg.max_items, pool.size()));
  std::uniform_int_distribution<int> first_year_dist(cfg.first_year_min, cfg.first_year_max);

  const std::size_t n_items = n_items_dist(rng);
  const int first_year = first_year_dist(rng);
  const int last_year = first_year + static_cast<int>(cfg.years) - 1;

  std::vector<std::size_t> chosen(pool.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
  std::shuffle(chosen.begin(), chosen.end(), rng);
  chosen.resize(n_items);

  const int majority = u(rng) < cfg.increasing_share ? 1 : -1;

  std::ostringstream id;
  id << "syn" << std::setw(4) << std::setfill('0') << index;

  SynthTable out;
  Table& t = out.table;
  t.id = id.str();
  t.dim_names = {"Item", "Year"};
  t.meta = {{"measure", cfg.measure}, {"report_year", std::to_string(last_year)}};

  struct ItemState {
    std::string name;
    std::string group;
    bool contrarian = false;
    bool spike = false;
    double importance = 0.0;
  };
  std::vector<ItemState> states;
  for (std::size_t item : chosen) {
    const int direction = u(rng) < cfg.follow_majority ? majority : -majority;
    const bool spike = u(rng) < cfg.spike_prob;
    const double growth = 0.05 + 0.20 * u(rng);
    double value = 50.0 + 950.0 * u(rng);
    std::uniform_int_distribution<std::size_t> spike_at(1, cfg.years - 1);
    const std::size_t spike_year = spike_at(rng);
    const double spike_mult = u(rng) < 0.5 ? 0.3 + 0.2 * u(rng) : 1.7 + 0.5 * u(rng);
    for (std::size_t y = 0; y < cfg.years; ++y) {
      if (y > 0) value *= 1.0 + direction * growth + 0.03 * gauss(rng);
      double v = value;
      if (spike && y == spike_year) v *= spike_mult;
      v = std::round(v * 10.0) / 10.0;
      t.cells.push_back({{pool[item].name, std::to_string(first_year + static_cast<int>(y))}, v});
    }
    ItemState s;
    s.name = pool[item].name;
    s.group = pool[item].group;
    s.contrarian = direction != majority;
    s.spike = spike;
    s.importance = cfg.popularity_weight * pool[item].popularity + (s.contrarian ? cfg.context_weight : 0.0) +
                   (spike ? cfg.spike_weight : 0.0) + cfg.importance_jitter * gauss(rng);
    states.push_back(s);
  }
  for (auto& s : states) {
    for (const auto& other : states) {
      if (&other != &s && other.spike && other.group == s.group) {
        s.importance += cfg.group_weight;
        break;
      }
    }
  }
  validate_table(t);

  std::stable_sort(states.begin(), states.end(),
                   [](const ItemState& a, const ItemState& b) { return a.importance > b.importance; });
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i == 0 || states[i].importance >= cfg.importance_threshold) out.important_items.push_back(states[i].name);
  }

  std::vector<std::string> sentences;
  for (const Insight& ins : extract_all(t, synth_extract_config())) {
    const std::string item = ins.subspace.fixed_value();
    if (std::find(out.important_items.begin(), out.important_items.end(), item) == out.important_items.end()) continue;
    if (ins.subspace.varying_dim != 1) continue;
    sentences.push_back(detail::paraphrase(ins.description, cfg.noise, rng));
  }
  for (std::size_t i = 0; i < cfg.filler_sentences; ++i) sentences.push_back(detail::filler_sentence(rng));
  std::shuffle(sentences.begin(), sentences.end(), rng);

  for (const auto& s : sentences) out.text += (out.text.empty() ? "" : " ") + s;
  out.document.table_id = t.id;
  out.document.meta = {{"report_year", std::to_string(last_year)}};
  out.document.sentences = split_sentences(out.text);
  return out;
}

inline std::vector<SynthTable> generate_corpus(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::vector<SynthTable> out;
  out.reserve(cfg.tables);
  for (std::size_t i = 0; i < cfg.tables; ++i) out.push_back(generate_table(cfg, i, rng));
  return out;
}

inline nlohmann::json document_json(const SynthTable& st) {
  return {{"table_id", st.table.id},
          {"meta", {{"report_year", std::stoi(st.document.meta.at("report_year"))}}},
          {"text", st.text}};
}

}  // namespace tar
