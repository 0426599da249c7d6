#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "support.hpp"
#include "tar/insight.hpp"
#include "tar/stats.hpp"

using namespace tar;
using tar::testing::car_sales;

namespace {

Subspace series(std::vector<double> values, bool years = true) {
  Subspace s;
  s.fixed = {{0, "A"}};
  s.varying_dim = 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.labels.push_back(years ? std::to_string(2015 + i) : std::string(1, static_cast<char>('a' + i)));
    s.cell_indices.push_back(i);
  }
  s.values = std::move(values);
  return s;
}

ExtractConfig raw_config(double threshold = 0.0) {
  ExtractConfig c;
  c.threshold = threshold;
  c.point_series = PointSeries::RawValues;
  return c;
}

}  // namespace

// Reference values below come from scipy.stats (t.cdf, linregress, norm.cdf).
TEST(Stats, StudentsTMatchesFrozenValues) {
  EXPECT_NEAR(stats::students_t_cdf(2.0, 3), 0.9303370157205785, 1e-12);
  EXPECT_NEAR(stats::students_t_cdf(0.5, 7), 0.6837964321553578, 1e-12);
  EXPECT_NEAR(stats::students_t_cdf(-1.3, 12), 0.10900858554175712, 1e-12);
  EXPECT_NEAR(stats::students_t_cdf(4.2, 25), 0.999851998050535, 1e-12);
  EXPECT_NEAR(stats::students_t_cdf(10.0, 5), 0.9999145262121285, 1e-12);
}

TEST(Stats, StudentsTMatchesBoostOnGrid) {
  for (double df : {1.0, 2.0, 3.0, 4.5, 8.0, 30.0, 200.0}) {
    boost::math::students_t dist(df);
    for (double t = -40.0; t <= 40.0; t += 0.37) {
      EXPECT_NEAR(stats::students_t_cdf(t, df), boost::math::cdf(dist, t), 1e-9) << "t=" << t << " df=" << df;
      const double tail = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
      EXPECT_NEAR(stats::students_t_two_sided_p(t, df), tail, 1e-9);
    }
  }
}

TEST(Stats, NormalCdfMatchesBoost) {
  boost::math::normal n;
  for (double z = -8.0; z <= 8.0; z += 0.05) EXPECT_NEAR(stats::normal_cdf(z), boost::math::cdf(n, z), 1e-14);
}

TEST(Stats, IncompleteBetaEdges) {
  EXPECT_EQ(stats::incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(stats::incomplete_beta(2.0, 3.0, 1.0), 1.0);
  EXPECT_THROW(stats::incomplete_beta(0.0, 1.0, 0.5), std::domain_error);
  EXPECT_THROW(stats::incomplete_beta(1.0, 1.0, 1.5), std::domain_error);
  EXPECT_NEAR(stats::incomplete_beta(1.0, 1.0, 0.3), 0.3, 1e-15);
}

TEST(Stats, TrendFitMatchesLinregress) {
  const double a[] = {13, 14, 20};
  const auto fa = stats::fit_trend(a);
  EXPECT_NEAR(fa.slope, 3.5, 1e-12);
  EXPECT_NEAR(fa.p_value, 0.2490101170113895, 1e-12);
  const double b[] = {51, 49, 60};
  EXPECT_NEAR(stats::fit_trend(b).p_value, 0.44251588684258064, 1e-12);
  const double c[] = {13, 20, 23};
  EXPECT_NEAR(stats::fit_trend(c).p_value, 0.14448791047580906, 1e-12);
}

TEST(PointInsight, FrozenOracle) {
  const auto ins = extract_point_insight(series({13, 49, 51, 60}), raw_config(), "Sales");
  ASSERT_TRUE(ins);
  EXPECT_EQ(*ins->point_index, 3u);
  EXPECT_NEAR(ins->significance, 0.8518332784724847, 1e-12);
  EXPECT_EQ(ins->description, "Sales of A in 2018 is outstanding.");
}

TEST(PointInsight, DegenerateVariance) {
  EXPECT_FALSE(extract_point_insight(series({5, 5, 5, 5}), raw_config()));
  const auto ins = extract_point_insight(series({1, 1, 1, 100}), raw_config());
  ASSERT_TRUE(ins);
  EXPECT_EQ(ins->significance, 1.0);
  EXPECT_EQ(*ins->point_index, 3u);
}

TEST(PointInsight, ThresholdAndLength) {
  EXPECT_FALSE(extract_point_insight(series({13, 49, 51, 60}), raw_config(0.9)));
  EXPECT_FALSE(extract_point_insight(series({1, 100}), raw_config()));
}

TEST(PointInsight, ChangeRatioSeries) {
  const Subspace s = series({100, 110, 0, 10, 11});
  const TestSeries ts = point_test_series(s, PointSeries::ChangeRatio);
  // 100->110, 110->0, (0->10 dropped), 10->11
  ASSERT_EQ(ts.values.size(), 3u);
  EXPECT_NEAR(ts.values[0], 0.1, 1e-15);
  EXPECT_NEAR(ts.values[1], -1.0, 1e-15);
  EXPECT_NEAR(ts.values[2], 0.1, 1e-15);
  EXPECT_EQ(ts.cell, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_TRUE(point_test_series(series({1, 2, 3}, false), PointSeries::ChangeRatio).values.empty());

  ExtractConfig c;
  c.threshold = 0.0;
  c.point_series = PointSeries::ChangeRatio;
  const auto ins = extract_point_insight(s, c, "Sales");
  ASSERT_TRUE(ins);
  EXPECT_EQ(*ins->point_index, 2u);
  EXPECT_EQ(ins->description, "Sales of A in 2017 is outstanding.");
}

TEST(ShapeInsight, CarSalesRows) {
  const auto a = extract_shape_insight(series({13, 14, 20}), raw_config(), "Sales");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->itype, InsightType::ShapeIncreasing);
  EXPECT_EQ(a->description, "Sales of A is increasing year over year.");
  EXPECT_NEAR(a->significance, 0.7509898829886105, 1e-12);
  EXPECT_NEAR(extract_shape_insight(series({51, 49, 60}), raw_config())->significance, 0.5574841131574193, 1e-12);
  EXPECT_NEAR(extract_shape_insight(series({13, 20, 23}), raw_config())->significance, 0.855512089524191, 1e-12);
}

TEST(ShapeInsight, FlatAndExact) {
  EXPECT_FALSE(extract_shape_insight(series({7, 7, 7}), raw_config()));
  const auto lin = extract_shape_insight(series({1, 2, 3}), raw_config());
  ASSERT_TRUE(lin);
  EXPECT_EQ(lin->significance, 1.0 - kMinSlopePValue);
  const auto down = extract_shape_insight(series({3, 2, 1}), raw_config());
  EXPECT_EQ(down->itype, InsightType::ShapeDecreasing);
}

TEST(ShapeInsight, NeedsOrderedLabels) { EXPECT_FALSE(extract_shape_insight(series({1, 2, 4}, false), raw_config())); }

TEST(Description, Templates) {
  Subspace b = series({51, 49, 60});
  b.fixed = {{0, "B"}};
  EXPECT_EQ(render_description(b, InsightType::PointOutstanding, 2, "Sales"), "Sales of B in 2017 is outstanding.");
  EXPECT_EQ(render_description(series({1, 2, 3}), InsightType::ShapeDecreasing, std::nullopt, "Sales"),
            "Sales of A is decreasing year over year.");
  Table t = car_sales();
  t.meta.clear();
  EXPECT_EQ(measure_name(t.meta), "Value");
  const auto all = extract_all(t, raw_config());
  EXPECT_EQ(all.front().description.rfind("Value of A", 0), 0u);
  EXPECT_THROW(render_description(b, InsightType::PointOutstanding, std::nullopt, "Sales"), std::invalid_argument);
}

TEST(ExtractAll, CarSales) {
  const auto all = extract_all(car_sales(), ExtractConfig{});
  auto has = [&](const std::string& desc) {
    return std::any_of(all.begin(), all.end(), [&](const Insight& i) { return i.description == desc; });
  };
  EXPECT_TRUE(has("Sales of A is increasing year over year."));
  EXPECT_TRUE(has("Sales of C is increasing year over year."));
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].id, "car#" + std::to_string(i));
    EXPECT_EQ(all[i].table_id, "car");
  }
  const auto again = extract_all(car_sales(), ExtractConfig{});
  ASSERT_EQ(again.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(to_json(all[i]), to_json(again[i]));
}

TEST(ExtractAll, SingleCell) {
  Table t{"one", {"Brand", "Year"}, {{{"A", "2015"}, 1.0}}, {}};
  EXPECT_TRUE(extract_all(t).empty());
}

TEST(InsightJson, RoundTrip) {
  for (const auto& ins : extract_all(car_sales(), raw_config())) {
    const Insight back = insight_from_json(to_json(ins));
    EXPECT_EQ(to_json(back), to_json(ins));
    EXPECT_EQ(back.subspace.values, ins.subspace.values);
  }
  auto j = to_json(extract_all(car_sales(), raw_config()).front());
  j["significance"] = 1.5;
  EXPECT_THROW(insight_from_json(j), DataError);
}

// ---- properties

TEST(ShapeProperties, ReversalFlipsTypeAndKeepsSignificance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 50.0);
  std::uniform_int_distribution<int> len(3, 12);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> v(len(rng));
    for (double& x : v) x = g(rng);
    std::vector<double> r(v.rbegin(), v.rend());
    const auto a = extract_shape_insight(series(v), raw_config());
    const auto b = extract_shape_insight(series(r), raw_config());
    ASSERT_EQ(a.has_value(), b.has_value());
    if (!a) continue;
    EXPECT_NE(a->itype, b->itype);
    EXPECT_EQ(a->significance, b->significance);
  }
}

TEST(ShapeProperties, ShiftAndScaleInvariance) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 10.0);
  std::uniform_real_distribution<double> shift(-1e3, 1e3), scale(0.01, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(6);
    for (double& x : v) x = g(rng);
    const auto base = extract_shape_insight(series(v), raw_config());
    if (!base) continue;
    const double c = shift(rng), k = scale(rng);
    std::vector<double> shifted = v, scaled = v;
    for (double& x : shifted) x += c;
    for (double& x : scaled) x *= k;
    EXPECT_NEAR(extract_shape_insight(series(shifted), raw_config())->significance, base->significance, 1e-9);
    EXPECT_NEAR(extract_shape_insight(series(scaled), raw_config())->significance, base->significance, 1e-9);
  }
}

TEST(PointProperties, SignificanceMonotoneInGap) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(5);
    for (double& x : v) x = g(rng);
    double lo = 0.0;
    for (double x : v) lo = std::max(lo, std::fabs(x));
    double prev = -1.0;
    for (double gap = lo + 0.01; gap < lo + 20.0; gap *= 1.3) {
      std::vector<double> w = v;
      w.push_back(gap);
      const auto s = score_point(w);
      ASSERT_TRUE(s);
      ASSERT_EQ(s->index, w.size() - 1);
      EXPECT_GE(s->significance, prev);
      prev = s->significance;
    }
  }
}

TEST(InsightFuzz, SignificanceInUnitInterval) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> len(1, 10), kind(0, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<double> v(len(rng));
    for (double& x : v) {
      switch (kind(rng)) {
        case 0: x = g(rng); break;
        case 1: x = g(rng) * 1e12; break;
        case 2: x = std::round(g(rng)); break;
        default: x = 0.0; break;
      }
    }
    for (PointSeries mode : {PointSeries::RawValues, PointSeries::ChangeRatio}) {
      ExtractConfig c;
      c.threshold = 0.0;
      c.point_series = mode;
      for (const auto& ins : {extract_point_insight(series(v), c), extract_shape_insight(series(v), c)}) {
        if (!ins) continue;
        EXPECT_GE(ins->significance, 0.0);
        EXPECT_LE(ins->significance, 1.0);
        EXPECT_FALSE(ins->description.empty());
        EXPECT_EQ(ins->point_index.has_value(), ins->itype == InsightType::PointOutstanding);
        if (ins->point_index) {
          EXPECT_LT(*ins->point_index, v.size());
        }
      }
    }
  }
}
