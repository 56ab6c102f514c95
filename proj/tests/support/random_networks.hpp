#pragma once

#include <cstdint>

#include "gjn/network.hpp"
#include "gjn/random.hpp"

namespace gjn::testing {

/// Random substochastic routing with row sums in [0.2, 0.9], so every
/// network is open.
inline Matrix random_routing(Index J, Rng& rng) {
  Matrix P(J, J);
  for (Index i = 0; i < J; ++i) {
    for (Index k = 0; k < J; ++k) P(i, k) = rng.uniform() * (rng.uniform() < 0.7 ? 1.0 : 0.0);
    const double total = P.row(i).sum();
    const double target = 0.2 + 0.7 * rng.uniform();
    if (total > 0.0) P.row(i) *= target / total;
  }
  return P;
}

inline DistributionSpec random_law(Rng& rng) {
  switch (rng.bits() % 6) {
    case 0: return DistributionSpec::exponential();
    case 1: return DistributionSpec::deterministic();
    case 2: return DistributionSpec::uniform(rng.uniform(), 1.0 + 2.0 * rng.uniform());
    case 3: return DistributionSpec::erlang(1 + static_cast<int>(rng.bits() % 5));
    case 4: return DistributionSpec::hyperexponential({0.3, 0.7}, {0.5 + rng.uniform(), 2.0 + rng.uniform()});
    default: return DistributionSpec::lognormal(0.2 + rng.uniform());
  }
}

/// Random valid network with J stations, external arrivals at every station
/// and the fully multiscale regime.
inline NetworkSpec random_network(Index J, std::uint64_t seed) {
  Rng rng(seed);
  NetworkSpec spec;
  spec.routing = random_routing(J, rng);
  spec.alpha = Vector(J);
  for (Index j = 0; j < J; ++j) {
    spec.alpha(j) = 0.1 + rng.uniform();
    spec.arrival.push_back(random_law(rng));
    spec.service.push_back(random_law(rng));
  }
  spec.regime = ScaleRegime::fully_multiscale(J);
  return spec;
}

inline NetworkSpec exponential_network(const Matrix& P, const Vector& alpha, ScaleRegime regime) {
  NetworkSpec spec;
  spec.routing = P;
  spec.alpha = alpha;
  for (Index j = 0; j < P.rows(); ++j) {
    spec.arrival.push_back(DistributionSpec::exponential());
    spec.service.push_back(DistributionSpec::exponential());
  }
  spec.regime = std::move(regime);
  return spec;
}

/// Two stations in series, Poisson arrivals at rate 1 to station 1.
inline NetworkSpec tandem(std::vector<double> exponents = {1.0, 2.0}) {
  Matrix P(2, 2);
  P << 0, 1, 0, 0;
  return exponential_network(P, Vector::Unit(2, 0), ScaleRegime::singletons(exponents));
}

inline NetworkSpec mm1() {
  return exponential_network(Matrix::Zero(1, 1), Vector::Ones(1), ScaleRegime::single_block(1));
}

}  // namespace gjn::testing
