#include "gjn/limit_calculus.hpp"

namespace gjn {

Matrix covariance_gamma(const NetworkSpec& spec) {
  const Vector lambda = solve_traffic(spec);
  Matrix gamma = covariance_gamma<double>(spec.routing, spec.alpha, lambda, spec.arrival_scv(), spec.service_scv());
  const double asym = (gamma - gamma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw Error(ErrorKind::NotPSD, "covariance is not symmetric");
  return gamma;
}

double sigma_primitives(const NetworkSpec& spec, Index j) {
  const Vector lambda = solve_traffic(spec);
  return sigma_primitives<double>(w_matrix(spec.routing), spec.alpha, lambda, spec.arrival_scv(), spec.service_scv(),
                                  j);
}

double sigma_uGu(const NetworkSpec& spec, Index j) {
  return sigma_uGu<double>(w_matrix(spec.routing), covariance_gamma(spec), j);
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Matching: return "matching";
    case Regime::Lowest: return "lowest";
    case Regime::BlockMatching: return "block-matching";
    case Regime::BlockLowest: return "block-lowest";
  }
  return "unknown";
}

Regime regime_from_string(std::string_view name) {
  for (Regime r : {Regime::Matching, Regime::Lowest, Regime::BlockMatching, Regime::BlockLowest}) {
    if (to_string(r) == name) return r;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown regime '" + std::string(name) + "'");
}

Vector SrbmComponent::initial_state(const Vector& xi) const {
  Vector x = Vector::Zero(dimension());
  for (std::size_t i = 0; i < initial_stations.size(); ++i) {
    x(static_cast<Index>(i)) = xi(initial_stations[i]);
  }
  return x;
}

namespace {

std::string slice_label(Index first, Index last) {
  if (first == last) return "xi[" + std::to_string(first + 1) + "]";
  return "xi[" + std::to_string(first + 1) + ":" + std::to_string(last + 1) + "]";
}

std::vector<Index> range(Index first, Index count) {
  std::vector<Index> out;
  for (Index i = 0; i < count; ++i) out.push_back(first + i);
  return out;
}

void check_reflection(const SrbmComponent& c) {
  if (!is_m_matrix(c.reflection)) {
    throw Error(ErrorKind::SingularBlock, "eliminated reflection block is not an M-matrix");
  }
}

}  // namespace

LimitDescriptor limit_descriptor(const Matrix& R, const Matrix& gamma, const ScaleRegime& scales, Regime regime) {
  const Index J = R.rows();
  if (scales.stations() != J) throw Error(ErrorKind::InvalidArgument, "scale regime does not match dimension");
  const bool per_station = regime == Regime::Matching || regime == Regime::Lowest;
  if (per_station && !scales.all_singletons()) {
    throw Error(ErrorKind::InvalidArgument, std::string(to_string(regime)) + " regime needs singleton blocks");
  }

  LimitDescriptor desc{regime, {}};
  for (Index k = 0; k < scales.block_count(); ++k) {
    const Block& block = scales.blocks[static_cast<std::size_t>(k)];
    const Index a = block.first;
    const Index n = block.size();
    const auto elim = eliminate(R, a);
    const Matrix cov = elim.E * gamma * elim.E.transpose();

    SrbmComponent c;
    c.stations = range(a, n);
    const bool lowest = regime == Regime::Lowest || regime == Regime::BlockLowest;
    if (!lowest) {
      c.drift = -elim.G.block(a, a, n, n) * block.drift;
      c.covariance = cov.block(a, a, n, n);
      c.reflection = elim.G.block(a, a, n, n);
      c.initial_stations = range(a, n);
      c.initial_label = slice_label(a, block.last);
      c.reported = range(0, n);
    } else {
      const Index d = J - a;
      c.drift = -elim.G.block(a, a, d, n) * block.drift;
      c.covariance = cov.bottomRightCorner(d, d);
      c.reflection = elim.G.bottomRightCorner(d, d);
      if (k == 0) {
        c.initial_stations = range(0, J);
        c.initial_label = "xi";
      } else {
        c.initial_label = "0";
      }
      c.reported = range(0, n);
    }
    check_reflection(c);
    desc.components.push_back(std::move(c));
  }
  return desc;
}

LimitDescriptor limit_descriptor(const NetworkSpec& spec, Regime regime) {
  return limit_descriptor(reflection_matrix(spec.routing), covariance_gamma(spec), spec.regime, regime);
}

}  // namespace gjn
