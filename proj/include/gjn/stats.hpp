#pragma once

#include <vector>

#include "gjn/types.hpp"

namespace gjn {

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
  Index n = 0;
};

/// Asymptotic Kolmogorov tail P(K > x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x);

/// One-sample KS against Exponential(rate), p-value from the asymptotic law
/// with Stephens' small-sample adjustment.
KsResult ks_one_sample_exponential(std::vector<double> sample, double rate);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);
double median(std::vector<double> x);
double pearson(const std::vector<double>& x, const std::vector<double>& y);
/// Pearson correlation of mid-ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Standard normal quantile.
double normal_quantile(double p);

/// Fisher-z confidence interval for a correlation estimated from n pairs.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};
Interval fisher_interval(double correlation, Index n, double level);

/// True if every step strictly decreases, except that a value at or below
/// `floor` may be followed by another one at or below it.
bool decreasing_toward_zero(const std::vector<double>& values, double floor = 0.0);

}  // namespace gjn
