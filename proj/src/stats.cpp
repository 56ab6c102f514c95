#include "gjn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gjn/error.hpp"

namespace gjn {

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series is slow here and the tail is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double adjusted_p(double d, double n) {
  const double sn = std::sqrt(n);
  return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

KsResult ks_one_sample_exponential(std::vector<double> sample, double rate) {
  if (sample.empty()) throw Error(ErrorKind::TooFewSamples, "empty sample");
  if (!(rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "exponential rate must be positive");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = sample[i] <= 0.0 ? 0.0 : -std::expm1(-rate * sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, adjusted_p(d, n), static_cast<Index>(sample.size())};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::TooFewSamples, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return {d, adjusted_p(d, na * nb / (na + nb)), static_cast<Index>(a.size() + b.size())};
}

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) {
  if (x.empty()) throw Error(ErrorKind::TooFewSamples, "median of empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw Error(ErrorKind::TooFewSamples, "need at least 3 pairs");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> mid_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(mid_ranks(x), mid_ranks(y));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile level outside (0,1)");
  // Bisection on the CDF 0.5 erfc(-x / sqrt 2).
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Interval fisher_interval(double correlation, Index n, double level) {
  if (n < 4) throw Error(ErrorKind::TooFewSamples, "Fisher interval needs at least 4 pairs");
  const double c = std::clamp(correlation, -1.0 + 1e-15, 1.0 - 1e-15);
  const double z = std::atanh(c);
  const double half = normal_quantile(0.5 + 0.5 * level) / std::sqrt(static_cast<double>(n - 3));
  return {std::tanh(z - half), std::tanh(z + half)};
}

bool decreasing_toward_zero(const std::vector<double>& values, double floor) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool at_floor = values[i] <= floor && values[i - 1] <= floor;
    if (!(values[i] < values[i - 1] || at_floor)) return false;
  }
  return true;
}

}  // namespace gjn
