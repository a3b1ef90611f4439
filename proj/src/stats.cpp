#include "cbe/stats.hpp"

#include <algorithm>
#include <cmath>

namespace cbe {

void RunningStats::add(double x) {
  if (n == 0) {
    min = max = x;
  } else {
    min = std::min(min, x);
    max = std::max(max, x);
  }
  ++n;
  double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  double d = o.mean - mean;
  std::size_t total = n + o.n;
  double nf = static_cast<double>(n), of = static_cast<double>(o.n);
  mean += d * of / static_cast<double>(total);
  m2 += o.m2 + d * d * nf * of / static_cast<double>(total);
  min = std::min(min, o.min);
  max = std::max(max, o.max);
  n = total;
}

double RunningStats::variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
double RunningStats::sd() const { return std::sqrt(variance()); }
double RunningStats::se() const {
  return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  CBE_CHECK(!sorted.empty(), "quantile of empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  double pos = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  CBE_CHECK(!sample.empty(), "ks_statistic on empty sample");
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    double hi = (static_cast<double>(i) + 1.0) / n - f;
    double lo = f - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  CBE_CHECK(!a.empty() && !b.empty(), "ks_two_sample on empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf) {
  CBE_CHECK(!sample.empty(), "anderson_darling on empty sample");
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    double g = cdf(sample[sample.size() - 1 - i]);
    f = std::clamp(f, 1e-300, 1.0 - 1e-16);
    g = std::clamp(g, 0.0, 1.0 - 1e-300);
    acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(f) + std::log1p(-g));
  }
  return -n - acc / n;
}

double chi_square_stat(const std::vector<double>& observed, const std::vector<double>& expected) {
  CBE_CHECK(observed.size() == expected.size(), "chi_square_stat: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    CBE_CHECK(expected[i] > 0.0, "chi_square_stat: nonpositive expected count");
    double d = observed[i] - expected[i];
    s += d * d / expected[i];
  }
  return s;
}

double pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
  CBE_CHECK(x.size() == y.size() && x.size() > 1, "pearson_corr: bad sizes");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  CBE_CHECK(x.size() == y.size() && x.size() > 1, "linear_fit: bad sizes");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  CBE_CHECK(sxx > 0.0, "linear_fit: degenerate x");
  LinFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace cbe
