#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "tar/text_align.hpp"

using namespace tar;
using tar::testing::fraction;

namespace {

Tokens toks(std::initializer_list<const char*> words) { return {words.begin(), words.end()}; }

Insight insight_with(const std::string& id, const std::string& fixed, const std::string& description) {
  Insight ins;
  ins.id = id;
  ins.table_id = "t";
  ins.subspace.fixed = {{0, fixed}};
  ins.subspace.varying_dim = 1;
  ins.subspace.labels = {"2015", "2016", "2017"};
  ins.subspace.values = {1, 2, 3};
  ins.itype = InsightType::ShapeIncreasing;
  ins.significance = 0.9;
  ins.description = description;
  return ins;
}

}  // namespace

TEST(Tokenize, DecimalsAndCase) {
  EXPECT_EQ(tokenize("Revenue was 71.7 million, or 1,200 units."),
            toks({"revenue", "was", "71.7", "million", "or", "1200", "units"}));
  EXPECT_EQ(tokenize("R&D-expenses"), toks({"r", "d", "expenses"}));
}

TEST(Preprocess, ReportYearSubstitution) {
  DocumentText doc;
  doc.table_id = "t";
  doc.meta = {{"report_year", "2017"}};
  doc.sentences = {"Revenue was 71.7 million for the year ended 2017 compared with 2016."};
  const auto out = preprocess(doc);
  ASSERT_EQ(out.size(), 1u);
  const Tokens& t = out[0].tokens;
  EXPECT_NE(std::find(t.begin(), t.end(), "71.7"), t.end());
  EXPECT_EQ(std::find(t.begin(), t.end(), "2017"), t.end());
  EXPECT_EQ(t, toks({"revenue", "was", "71.7", "million", "for", "the", "year", "ended", "this", "year", "compared",
                     "with", "last", "year"}));
  EXPECT_TRUE(out[0].has_number);
}

TEST(Preprocess, DatesAreStripped) {
  EXPECT_EQ(normalize_text("As of December 31, 2017 cash rose", 2017),
            toks({"as", "of", "this", "year", "cash", "rose"}));
}

TEST(Preprocess, Filters) {
  DocumentText doc;
  doc.table_id = "t";
  const std::string few_chars = "Sales rose 5 percent in the north and the south.";
  ASSERT_LT(few_chars.size(), 50u);
  ASSERT_GE(tokenize(few_chars).size(), 10u);
  const std::string few_tokens = "Consolidated revenue increased 12 percent overall throughout fiscal.";
  ASSERT_GE(few_tokens.size(), 50u);
  ASSERT_LT(tokenize(few_tokens).size(), 10u);
  const std::string numeric = "Revenue of 4 units rose in the north and south regions.";
  const std::string no_signal = "The board met several times during the period to discuss strategy and hiring.";
  const std::string keyword = "The board discussed the decline in demand across the many regions we serve today.";
  doc.sentences = {few_chars, few_tokens, numeric, no_signal, keyword};
  const auto out = preprocess(doc);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].raw, numeric);
  EXPECT_EQ(out[1].raw, keyword);
  EXPECT_FALSE(out[1].has_number);

  // header words count as keywords
  const auto with_headers = preprocess(doc, TextConfig{}, {"strategy"});
  EXPECT_EQ(with_headers.size(), 3u);

  TextConfig strict;
  strict.min_chars = 60;
  EXPECT_EQ(preprocess(doc, strict).size(), 1u);
}

TEST(SimSentence, Examples) {
  const Tokens five = toks({"a", "b", "c", "d", "e"});
  EXPECT_EQ(sim_sentence(five, five), 1.0);
  EXPECT_EQ(sim_sentence(five, toks({"x", "y"})), 0.0);
  EXPECT_NEAR(sim_sentence(toks({"revenue", "increased", "this", "year"}),
                           toks({"total", "revenue", "increased", "significantly", "this", "year"})),
              0.6667, 5e-5);
  EXPECT_THROW(sim_sentence({}, five), std::invalid_argument);
}

TEST(SimSentence, CountModes) {
  const Tokens d = toks({"year", "over", "year"});
  const Tokens s = toks({"this", "year", "over", "year"});
  EXPECT_EQ(count_shared(d, s, CountMode::Multiset), 3u);
  EXPECT_EQ(count_shared(d, s, CountMode::DistinctTypes), 2u);
  EXPECT_DOUBLE_EQ(sim_sentence(d, s, CountMode::DistinctTypes), 4.0 / 12.0);
  EXPECT_DOUBLE_EQ(sim_sentence(d, d, CountMode::Multiset), 1.0);
  EXPECT_LT(sim_sentence(d, d, CountMode::DistinctTypes), 1.0);
}

TEST(SimHeader, Examples) {
  const std::vector<Tokens> headers = {toks({"operating", "income"}), toks({"total", "revenue"})};
  EXPECT_DOUBLE_EQ(sim_header(headers[0], toks({"total", "revenue", "and", "income", "rose"}), headers), 0.25);
  EXPECT_DOUBLE_EQ(sim_header(headers[1], toks({"total", "revenue", "rose"}), headers), 1.0);
  EXPECT_EQ(sim_header(headers[0], toks({"nothing", "here"}), headers), 0.0);
}

TEST(SimCombined, Examples) {
  const std::vector<Tokens> headers = {toks({"operating", "income"}), toks({"total", "revenue"})};
  const Tokens d = toks({"revenue", "increased", "this", "year"});
  const Tokens s = toks({"total", "revenue", "increased", "this", "year", "income"});
  EXPECT_NEAR(sim_combined(d, headers[0], s, headers), 0.4583, 5e-5);
  EXPECT_EQ(sim_combined(headers[1], headers[1], headers[1], headers), 1.0);
  TextConfig only_s;
  only_s.sentence_weight = 1.0;
  only_s.header_weight = 0.0;
  EXPECT_EQ(sim_combined(d, headers[0], s, headers, only_s), sim_sentence(d, s));
}

TEST(SimGolden, HandComputedPairs) {
  const auto g = detail::parse_file(std::string(TAR_TEST_DATA) + "/sim_golden.json");
  ASSERT_EQ(g["pairs"].size(), 10u);
  for (const auto& p : g["pairs"]) {
    const auto d = p["d"].get<Tokens>(), s = p["s"].get<Tokens>(), h = p["h"].get<Tokens>();
    const auto headers = p["headers"].get<std::vector<Tokens>>();
    EXPECT_NEAR(sim_sentence(d, s), fraction(p["sim_s"]), 1e-12);
    EXPECT_NEAR(sim_header(h, s, headers), fraction(p["sim_h"]), 1e-12);
    EXPECT_NEAR(sim_combined(d, h, s, headers), fraction(p["sim_sh"]), 1e-12);
  }
}

TEST(SimProperties, BoundsSymmetryMonotonicity) {
  std::mt19937_64 rng(21);
  const Tokens vocab = toks({"a", "b", "c", "d", "e", "f", "g", "h"});
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1), len(1, 9);
  auto random_tokens = [&] {
    Tokens t(len(rng));
    for (auto& w : t) w = vocab[word(rng)];
    return t;
  };
  for (int trial = 0; trial < 3000; ++trial) {
    const Tokens d = random_tokens(), s = random_tokens();
    std::vector<Tokens> headers = {random_tokens(), random_tokens(), random_tokens()};
    for (CountMode mode : {CountMode::Multiset, CountMode::DistinctTypes}) {
      const double ss = sim_sentence(d, s, mode);
      EXPECT_GE(ss, 0.0);
      EXPECT_LE(ss, 1.0);
      EXPECT_EQ(ss, sim_sentence(s, d, mode));
      const double sh = sim_header(headers[0], s, headers, mode);
      EXPECT_GE(sh, 0.0);
      EXPECT_LE(sh, 1.0);
      TextConfig cfg;
      cfg.count_mode = mode;
      const double c = sim_combined(d, headers[0], s, headers, cfg);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
    }
    // adding a not-yet-shared token of d to s never lowers Sim_s
    for (const auto& w : d) {
      if (std::find(s.begin(), s.end(), w) != s.end()) continue;
      Tokens s2 = s;
      s2.push_back(w);
      EXPECT_GE(sim_sentence(d, s2, CountMode::DistinctTypes), sim_sentence(d, s, CountMode::DistinctTypes));
      EXPECT_GE(sim_sentence(d, s2, CountMode::Multiset), sim_sentence(d, s, CountMode::Multiset));
      break;
    }
    Tokens uniq = d;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    EXPECT_EQ(sim_sentence(uniq, uniq, CountMode::DistinctTypes), 1.0);
  }
}

TEST(LabelInsights, SingleExactSentence) {
  const auto ins = insight_with("t#0", "A", "Sales of A is increasing year over year.");
  const std::vector<TokenizedSentence> sents = {{ins.description, tokenize(ins.description), false}};
  const auto out = label_insights({ins}, sents);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].gold_score, 1.0);
  EXPECT_EQ(out[0].gold_rank, 1u);
  EXPECT_EQ(out[0].best_sentence_index, 0u);
}

TEST(LabelInsights, NoSentences) {
  const auto out = label_insights({insight_with("t#1", "B", "x b"), insight_with("t#0", "A", "x a")}, {});
  EXPECT_EQ(out[0].gold_score, 0.0);
  EXPECT_FALSE(out[0].best_sentence_index);
  EXPECT_EQ(out[0].gold_rank, 2u);
  EXPECT_EQ(out[1].gold_rank, 1u);
}

TEST(LabelInsights, TiesBreakById) {
  const auto a = insight_with("t#0", "A", "Sales of A rose.");
  const auto b = insight_with("t#1", "B", "Sales of B rose.");
  const std::vector<TokenizedSentence> sents = {{"", toks({"sales", "rose"}), false}};
  const auto out = label_insights({b, a}, sents);
  EXPECT_EQ(out[0].gold_score, out[1].gold_score);
  EXPECT_EQ(out[0].gold_rank, 2u);  // t#1
  EXPECT_EQ(out[1].gold_rank, 1u);  // t#0
}

// 3 insights x 2 sentences, similarity matrix evaluated by hand.
TEST(LabelInsights, HandMatrix) {
  const auto i0 = insight_with("t#0", "net income", "net income rose");
  const auto i1 = insight_with("t#1", "total revenue", "total revenue fell");
  const auto i2 = insight_with("t#2", "cash", "cash rose");
  const std::vector<TokenizedSentence> sents = {
      {"", toks({"net", "income", "rose", "sharply"}), false},
      {"", toks({"total", "revenue", "fell", "and", "cash", "rose"}), false}};
  // headers: [net income], [total revenue], [cash]
  // s0: counts 2, 0, 0 (max 2)   s1: counts 0, 2, 1 (max 2)
  // i0: s0 = 0.5*(9/12) + 0.5*1 = 7/8;  s1 = 0.5*(1/18) + 0 = 1/36
  // i1: s0 = 0;                          s1 = 0.5*(9/18) + 0.5*1 = 3/4
  // i2: s0 = 0.5*(1/8) + 0 = 1/16;       s1 = 0.5*(4/12) + 0.5*(1/1)(1/2) = 5/12
  const auto out = label_insights({i0, i1, i2}, sents);
  EXPECT_NEAR(out[0].gold_score, 7.0 / 8.0, 1e-15);
  EXPECT_EQ(out[0].best_sentence_index, 0u);
  EXPECT_NEAR(out[1].gold_score, 3.0 / 4.0, 1e-15);
  EXPECT_EQ(out[1].best_sentence_index, 1u);
  EXPECT_NEAR(out[2].gold_score, 5.0 / 12.0, 1e-15);
  EXPECT_EQ(out[2].best_sentence_index, 1u);
  EXPECT_EQ(out[0].gold_rank, 1u);
  EXPECT_EQ(out[1].gold_rank, 2u);
  EXPECT_EQ(out[2].gold_rank, 3u);
}

TEST(LabelInsights, RanksArePermutationAndOrderInvariant) {
  std::mt19937_64 rng(2);
  const std::vector<std::string> words = {"sales", "revenue", "income", "rose", "fell", "cash", "net", "total"};
  std::uniform_int_distribution<std::size_t> w(0, words.size() - 1), n(1, 7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Insight> ins;
    const std::size_t m = n(rng);
    for (std::size_t i = 0; i < m; ++i) {
      ins.push_back(insight_with("t#" + std::to_string(i), words[w(rng)], words[w(rng)] + " " + words[w(rng)]));
    }
    std::vector<TokenizedSentence> sents;
    for (std::size_t j = 0; j < n(rng); ++j) sents.push_back({"", {words[w(rng)], words[w(rng)], words[w(rng)]}, false});
    const auto out = label_insights(ins, sents);
    std::vector<std::size_t> ranks;
    std::map<std::string, std::size_t> by_id;
    for (const auto& li : out) {
      ranks.push_back(li.gold_rank);
      by_id[li.insight.id] = li.gold_rank;
    }
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < ranks.size(); ++i) EXPECT_EQ(ranks[i], i + 1);
    std::shuffle(ins.begin(), ins.end(), rng);
    for (const auto& li : label_insights(ins, sents)) EXPECT_EQ(by_id[li.insight.id], li.gold_rank);
  }
}

TEST(LabeledJson, RoundTrip) {
  const auto ins = insight_with("t#0", "A", "Sales of A is increasing year over year.");
  const std::vector<TokenizedSentence> sents = {{"", toks({"sales", "of", "a"}), false}};
  const auto li = label_insights({ins}, sents)[0];
  const auto back = labeled_insight_from_json(to_json(li));
  EXPECT_EQ(back.gold_score, li.gold_score);
  EXPECT_EQ(back.gold_rank, li.gold_rank);
  EXPECT_EQ(back.best_sentence_index, li.best_sentence_index);
}

TEST(Terciles, Boundaries) {
  const auto [lo, hi] = tercile_boundaries({0.9, 0.1, 0.5, 0.3, 0.7, 0.2});
  EXPECT_EQ(lo, 0.3);
  EXPECT_EQ(hi, 0.7);
}
