#include "gjn/network.hpp"

#include <cmath>
#include <sstream>

#include "gjn/error.hpp"

namespace gjn {

ScaleRegime ScaleRegime::fully_multiscale(Index stations) {
  std::vector<double> exponents;
  for (Index j = 0; j < stations; ++j) exponents.push_back(static_cast<double>(j + 1));
  return singletons(exponents);
}

ScaleRegime ScaleRegime::single_block(Index stations, double exponent) {
  return ScaleRegime{{Block{0, stations - 1, exponent, Vector::Ones(stations)}}};
}

ScaleRegime ScaleRegime::singletons(const std::vector<double>& exponents) {
  ScaleRegime regime;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    const auto idx = static_cast<Index>(j);
    regime.blocks.push_back(Block{idx, idx, exponents[j], Vector::Ones(1)});
  }
  return regime;
}

Index ScaleRegime::block_of(Index station) const {
  for (Index k = 0; k < block_count(); ++k) {
    const Block& b = blocks[static_cast<std::size_t>(k)];
    if (station >= b.first && station <= b.last) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "station " + std::to_string(station + 1) + " not in any block");
}

bool ScaleRegime::all_singletons() const {
  for (const Block& b : blocks) {
    if (b.size() != 1) return false;
  }
  return true;
}

double ScaleRegime::gamma(Index block, double r) const {
  return std::pow(r, blocks.at(static_cast<std::size_t>(block)).exponent);
}

Vector ScaleRegime::station_gamma(double r) const {
  Vector g(stations());
  for (Index k = 0; k < block_count(); ++k) {
    const Block& b = blocks[static_cast<std::size_t>(k)];
    g.segment(b.first, b.size()).setConstant(gamma(k, r));
  }
  return g;
}

Vector ScaleRegime::idle_rates(double r) const {
  Vector delta(stations());
  for (Index k = 0; k < block_count(); ++k) {
    const Block& b = blocks[static_cast<std::size_t>(k)];
    delta.segment(b.first, b.size()) = gamma(k, r) * b.drift;
  }
  return delta;
}

Vector NetworkSpec::arrival_scv() const {
  Vector c(stations());
  for (Index j = 0; j < stations(); ++j) c(j) = arrival[static_cast<std::size_t>(j)].scv();
  return c;
}

Vector NetworkSpec::service_scv() const {
  Vector c(stations());
  for (Index j = 0; j < stations(); ++j) c(j) = service[static_cast<std::size_t>(j)].scv();
  return c;
}

Vector solve_traffic(const NetworkSpec& spec) {
  const Index J = spec.stations();
  const Matrix A = Matrix::Identity(J, J) - spec.routing.transpose();
  Eigen::PartialPivLU<Matrix> lu(A);
  if (!(lu.rcond() > 1e-12)) {
    throw Error(ErrorKind::SingularRouting, "I - P' is numerically singular");
  }
  Vector lambda = lu.solve(spec.alpha);
  for (Index j = 0; j < J; ++j) {
    if (!(lambda(j) > 0.0)) {
      throw Error(ErrorKind::DeadStation,
                  "station " + std::to_string(j + 1) + " has nominal arrival rate <= 0");
    }
  }
  return lambda;
}

Vector service_rates(const NetworkSpec& spec, const Vector& lambda, double r) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "r must lie in (0, 1)");
  return lambda + spec.regime.idle_rates(r);
}

Vector service_rates(const NetworkSpec& spec, double r) {
  return service_rates(spec, solve_traffic(spec), r);
}

double spectral_radius(const Matrix& routing) {
  if (routing.size() == 0) return 0.0;
  return Eigen::EigenSolver<Matrix>(routing, false).eigenvalues().cwiseAbs().maxCoeff();
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i].message;
  }
  return os.str();
}

namespace {

std::string station_label(Index j) { return std::to_string(j + 1); }

}  // namespace

ValidationReport validate(const NetworkSpec& spec) {
  ValidationReport report;
  auto add = [&](std::string msg, std::optional<Index> station = {}, std::optional<Index> block = {}) {
    report.issues.push_back({std::move(msg), station, block});
  };

  const Index J = spec.stations();
  if (J < 1) {
    add("network needs at least one station");
    return report;
  }
  if (spec.routing.cols() != J) {
    add("routing matrix must be square");
    return report;
  }
  bool routing_ok = true;
  for (Index i = 0; i < J; ++i) {
    for (Index j = 0; j < J; ++j) {
      if (!(spec.routing(i, j) >= 0.0)) {
        add("routing entry (" + station_label(i) + "," + station_label(j) + ") is negative", i + 1);
        routing_ok = false;
      }
    }
    if (spec.routing.row(i).sum() > 1.0 + 1e-12) {
      add("routing row " + station_label(i) + " exceeds 1", i + 1);
      routing_ok = false;
    }
  }
  if (routing_ok && !(spectral_radius(spec.routing) < 1.0 - 1e-12)) {
    add("routing matrix is not open (spectral radius >= 1)");
    routing_ok = false;
  }

  bool alpha_ok = spec.alpha.size() == J;
  if (!alpha_ok) {
    add("alpha must have one entry per station");
  } else {
    for (Index j = 0; j < J; ++j) {
      if (!(spec.alpha(j) >= 0.0)) {
        add("alpha of station " + station_label(j) + " is negative", j + 1);
        alpha_ok = false;
      }
    }
  }
  if (static_cast<Index>(spec.arrival.size()) != J) add("arrival_dists must have one entry per station");
  if (static_cast<Index>(spec.service.size()) != J) add("service_dists must have one entry per station");

  if (routing_ok && alpha_ok) {
    const Matrix A = Matrix::Identity(J, J) - spec.routing.transpose();
    const Vector lambda = A.partialPivLu().solve(spec.alpha);
    for (Index j = 0; j < J; ++j) {
      if (!(lambda(j) > 1e-12)) add("station " + station_label(j) + " receives no traffic", j + 1);
    }
  }

  const ScaleRegime& regime = spec.regime;
  if (regime.blocks.empty()) {
    add("scale regime has no blocks");
    return report;
  }
  Index expected_first = 0;
  for (Index k = 0; k < regime.block_count(); ++k) {
    const Block& b = regime.blocks[static_cast<std::size_t>(k)];
    const std::string label = std::to_string(k + 1);
    if (b.first != expected_first || b.last < b.first) {
      add("block " + label + " is not contiguous with the previous block", {}, k + 1);
    }
    expected_first = b.last + 1;
    if (!(b.exponent > 0.0)) add("block " + label + " exponent must be positive", {}, k + 1);
    if (k > 0 && !(b.exponent > regime.blocks[static_cast<std::size_t>(k - 1)].exponent)) {
      add("exponents not increasing", {}, k + 1);
    }
    if (b.drift.size() != b.size()) {
      add("block " + label + " drift has wrong length", {}, k + 1);
    } else if (!(b.drift.array() > 0.0).all()) {
      add("block " + label + " drift must be strictly positive", {}, k + 1);
    }
  }
  if (expected_first != J) add("blocks do not cover all stations");
  return report;
}

void require_valid(const NetworkSpec& spec) {
  const ValidationReport report = validate(spec);
  if (!report.ok()) throw Error(ErrorKind::Config, "invalid network: " + report.summary());
}

}  // namespace gjn
