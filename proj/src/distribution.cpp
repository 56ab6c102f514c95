#include "gjn/distribution.hpp"

#include <cmath>
#include <numeric>

#include "gjn/error.hpp"

namespace gjn {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Exponential: return "exponential";
    case Family::Deterministic: return "deterministic";
    case Family::Uniform: return "uniform";
    case Family::Erlang: return "erlang";
    case Family::Hyperexponential: return "hyperexponential";
    case Family::Lognormal: return "lognormal";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::Exponential, Family::Deterministic, Family::Uniform, Family::Erlang,
                   Family::Hyperexponential, Family::Lognormal}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown distribution family '" + std::string(name) + "'");
}

DistributionSpec DistributionSpec::exponential() { return {Family::Exponential, 1.0}; }

DistributionSpec DistributionSpec::deterministic() { return {Family::Deterministic, 0.0}; }

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  if (!(lo >= 0.0 && hi > lo)) {
    throw Error(ErrorKind::InvalidArgument, "uniform requires 0 <= lo < hi");
  }
  const double m = 0.5 * (lo + hi);
  DistributionSpec d(Family::Uniform, (hi - lo) * (hi - lo) / 12.0 / (m * m));
  d.params_ = {lo / m, hi / m};
  return d;
}

DistributionSpec DistributionSpec::erlang(int shape) {
  if (shape < 1) throw Error(ErrorKind::InvalidArgument, "erlang shape must be >= 1");
  DistributionSpec d(Family::Erlang, 1.0 / shape);
  d.shape_ = shape;
  return d;
}

DistributionSpec DistributionSpec::hyperexponential(std::vector<double> probs,
                                                    std::vector<double> rates) {
  if (probs.empty() || probs.size() != rates.size()) {
    throw Error(ErrorKind::InvalidArgument, "hyperexponential needs matching probs/rates");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0) || !(rates[i] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "hyperexponential probs and rates must be positive");
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "hyperexponential probs must sum to 1");
  }
  double m = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    m += probs[i] / rates[i];
    second += 2.0 * probs[i] / (rates[i] * rates[i]);
  }
  DistributionSpec d(Family::Hyperexponential, second / (m * m) - 1.0);
  d.params_ = std::move(probs);
  for (double& p : d.params_) p /= total;
  for (double& rate : rates) rate *= m;
  d.rates_ = std::move(rates);
  return d;
}

DistributionSpec DistributionSpec::lognormal(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "lognormal sigma must be > 0");
  DistributionSpec d(Family::Lognormal, std::expm1(sigma * sigma));
  d.params_ = {-0.5 * sigma * sigma, sigma};
  return d;
}

double DistributionSpec::sample(Rng& rng) const {
  switch (family_) {
    case Family::Exponential:
      return rng.exponential();
    case Family::Deterministic:
      return 1.0;
    case Family::Uniform:
      return params_[0] + (params_[1] - params_[0]) * rng.uniform();
    case Family::Erlang: {
      double sum = 0.0;
      for (int i = 0; i < shape_; ++i) sum += rng.exponential();
      return sum / shape_;
    }
    case Family::Hyperexponential: {
      double u = rng.uniform();
      std::size_t branch = 0;
      while (branch + 1 < params_.size() && u > params_[branch]) {
        u -= params_[branch];
        ++branch;
      }
      return rng.exponential() / rates_[branch];
    }
    case Family::Lognormal:
      return std::exp(params_[0] + params_[1] * rng.normal());
  }
  return 1.0;
}

}  // namespace gjn
