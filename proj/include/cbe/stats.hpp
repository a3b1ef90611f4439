#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cbe/common.hpp"

namespace cbe {

// Streaming moments with exact merging (Chan et al. update), so aggregates
// computed from shards equal aggregates from the concatenated sample.
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = 0.0;
  double max = 0.0;

  void add(double x);
  void merge(const RunningStats& o);
  double variance() const;  // sample variance (n - 1 denominator)
  double sd() const;
  double se() const;  // standard error of the mean
};

// Linear-interpolated quantile of an already sorted sample, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.
// Sorts a copy of the sample.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Anderson-Darling statistic of a sample against a CDF.
double anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf);

// Pearson chi-square statistic for observed counts vs expected counts.
double chi_square_stat(const std::vector<double>& observed, const std::vector<double>& expected);

// Pearson correlation coefficient.
double pearson_corr(const std::vector<double>& x, const std::vector<double>& y);

// Ordinary least squares y = intercept + slope * x with R^2.
struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cbe
