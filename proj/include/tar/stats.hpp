#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

namespace tar::stats {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete_beta: a and b must be positive");
  if (x < 0.0 || x > 1.0) throw std::domain_error("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Two-sided tail P(|T| >= |t|) of Student's t with `df` degrees of freedom.
inline double students_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::domain_error("students_t: df must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(0.5 * df, 0.5, x);
}

inline double students_t_cdf(double t, double df) {
  const double tail = 0.5 * students_t_two_sided_p(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

struct SampleMoments {
  double mean = 0.0;
  double stddev = 0.0;  // n - 1 denominator
  std::size_t n = 0;
};

inline SampleMoments sample_moments(std::span<const double> xs) {
  SampleMoments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(m.n - 1));
  return m;
}

struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;  // value at position 0
  double sse = 0.0;
  double t_stat = 0.0;     // +-inf for an exact non-flat fit
  double p_value = 1.0;    // two-sided, slope != 0
};

// OLS of y against positions 0..n-1. Sums pair position i with n-1-i so that
// reversing y negates the slope and leaves sse, |t| and p bit-identical.
inline TrendFit fit_trend(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3) throw std::invalid_argument("fit_trend: need at least 3 points");
  const double center = 0.5 * static_cast<double>(n - 1);
  const std::size_t half = n / 2;

  double sum = 0.0;
  for (std::size_t i = 0; i < half; ++i) sum += y[i] + y[n - 1 - i];
  if (n % 2 == 1) sum += y[half];
  const double mean = sum / static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double c = static_cast<double>(i) - center;
    sxx += 2.0 * c * c;
    sxy += c * (y[i] - y[n - 1 - i]);
  }

  TrendFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean - fit.slope * center;
  for (std::size_t i = 0; i < half; ++i) {
    const double c = static_cast<double>(i) - center;
    const double r_lo = y[i] - mean - fit.slope * c;
    const double r_hi = y[n - 1 - i] - mean + fit.slope * c;
    fit.sse += r_lo * r_lo + r_hi * r_hi;
  }
  if (n % 2 == 1) fit.sse += (y[half] - mean) * (y[half] - mean);

  const double df = static_cast<double>(n - 2);
  if (fit.slope == 0.0) {
    fit.t_stat = 0.0;
    fit.p_value = 1.0;
    return fit;
  }
  const double se = std::sqrt(fit.sse / df / sxx);
  if (se == 0.0) {
    fit.t_stat = std::copysign(std::numeric_limits<double>::infinity(), fit.slope);
    fit.p_value = 0.0;
    return fit;
  }
  fit.t_stat = fit.slope / se;
  fit.p_value = students_t_two_sided_p(fit.t_stat, df);
  return fit;
}

}  // namespace tar::stats
