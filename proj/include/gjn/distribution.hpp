#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gjn/random.hpp"

namespace gjn {

enum class Family { Exponential, Deterministic, Uniform, Erlang, Hyperexponential, Lognormal };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// A unitized primitive law: every instance has mean exactly 1. Raw
/// user parameters are rescaled on construction, so a uniform on [2, 6] is
/// stored as uniform on [0.5, 1.5]. All families have finite moments of every
/// order, which covers the (2+eps)-moment requirement.
class DistributionSpec {
 public:
  static DistributionSpec exponential();
  static DistributionSpec deterministic();
  /// Uniform on [lo, hi], 0 <= lo < hi.
  static DistributionSpec uniform(double lo, double hi);
  /// Erlang with integer shape k >= 1.
  static DistributionSpec erlang(int shape);
  /// Mixture of exponentials with branch probabilities and rates.
  static DistributionSpec hyperexponential(std::vector<double> probs, std::vector<double> rates);
  /// Lognormal with log-scale sigma > 0 (the location is fixed by the mean).
  static DistributionSpec lognormal(double sigma);

  DistributionSpec() : DistributionSpec(exponential()) {}

  Family family() const { return family_; }
  /// Squared coefficient of variation, equal to the variance since mean is 1.
  double scv() const { return scv_; }
  double mean() const { return 1.0; }

  /// Normalized parameters (after mean-1 rescaling).
  const std::vector<double>& params() const { return params_; }
  /// Secondary parameter list; only the hyperexponential rates use it.
  const std::vector<double>& rates() const { return rates_; }
  int shape() const { return shape_; }

  double sample(Rng& rng) const;

 private:
  DistributionSpec(Family f, double scv) : family_(f), scv_(scv) {}

  Family family_;
  double scv_ = 1.0;
  std::vector<double> params_;
  std::vector<double> rates_;
  int shape_ = 1;
};

}  // namespace gjn
