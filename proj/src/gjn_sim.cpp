#include "gjn/gjn_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gjn/error.hpp"

namespace gjn {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

// Stream layout within a replication seed: arrivals, services, routing.
enum Stream : std::uint64_t { kArrival = 0, kService = 1, kRouting = 2 };

class Engine {
 public:
  Engine(const NetworkSpec& spec, double r, const CountVector& z0, std::uint64_t seed, const SimOptions& options)
      : spec_(spec), options_(options), J_(spec.stations()) {
    mu_ = service_rates(spec, r);
    z_ = z0;
    arrivals_ = CountVector::Zero(J_);
    routed_ = CountVector::Zero(J_);
    departures_ = CountVector::Zero(J_);
    busy_acc_ = Vector::Zero(J_);
    busy_since_ = Vector::Zero(J_);
    integral_ = Vector::Zero(J_);
    busy_.assign(J_, false);
    next_arrival_.assign(J_, kNever);
    next_departure_.assign(J_, kNever);
    cumulative_.resize(J_);
    for (Index j = 0; j < J_; ++j) {
      arrival_rng_.emplace_back(derive_seed(seed, static_cast<std::uint64_t>(j), kArrival));
      service_rng_.emplace_back(derive_seed(seed, static_cast<std::uint64_t>(j), kService));
      routing_rng_.emplace_back(derive_seed(seed, static_cast<std::uint64_t>(j), kRouting));
      double c = 0.0;
      for (Index k = 0; k < J_; ++k) {
        c += spec.routing(j, k);
        cumulative_[j].push_back(c);
      }
      if (spec.alpha(j) > 0.0) next_arrival_[j] = spec.arrival[j].sample(arrival_rng_[j]) / spec.alpha(j);
    }
    for (Index j = 0; j < J_; ++j) {
      if (z_(j) > 0) start_service(j, 0.0);
    }
  }

  SimOutput run(double horizon, const Vector& obs, double r) {
    const Index n_obs = obs.size();
    SimOutput out;
    out.r = r;
    out.service_rates = mu_;
    out.initial = z_;
    out.sample_times = obs;
    out.queue_lengths.resize(n_obs, J_);
    out.busy_times.resize(n_obs, J_);
    out.idle_regulator.resize(n_obs, J_);
    out.queue_integrals.resize(n_obs, J_);
    out.external_arrivals.resize(n_obs, J_);
    out.routed_in.resize(n_obs, J_);
    out.departures.resize(n_obs, J_);

    Index next_obs = 0;
    for (;;) {
      // Earliest event; ties go to the lower station, then departure first.
      double te = kNever;
      Index station = -1;
      bool departure = false;
      for (Index j = 0; j < J_; ++j) {
        if (next_departure_[j] < te) {
          te = next_departure_[j];
          station = j;
          departure = true;
        }
        if (next_arrival_[j] < te) {
          te = next_arrival_[j];
          station = j;
          departure = false;
        }
      }
      while (next_obs < n_obs && obs(next_obs) < te && obs(next_obs) <= horizon) {
        record(out, next_obs, obs(next_obs));
        ++next_obs;
      }
      if (station < 0 || te > horizon) break;

      if (++events_ > options_.event_cap) {
        throw Error(ErrorKind::EventOverflow, "event cap of " + std::to_string(options_.event_cap) +
                                                  " reached at t = " + std::to_string(te));
      }
      advance(te);
      if (departure) depart(station, te); else arrive(station, te);
      if (options_.audit) audit();
    }
    while (next_obs < n_obs) {
      record(out, next_obs, obs(next_obs));
      ++next_obs;
    }
    out.event_count = events_;
    out.work_conservation_violations = violations_;
    return out;
  }

 private:
  void advance(double t) {
    const double dt = t - last_time_;
    for (Index j = 0; j < J_; ++j) integral_(j) += static_cast<double>(z_(j)) * dt;
    last_time_ = t;
  }

  void start_service(Index j, double t) {
    busy_[j] = true;
    busy_since_(j) = t;
    next_departure_[j] = t + spec_.service[j].sample(service_rng_[j]) / mu_(j);
  }

  void enqueue(Index j, double t) {
    ++z_(j);
    if (!busy_[j]) start_service(j, t);
  }

  void arrive(Index j, double t) {
    ++arrivals_(j);
    enqueue(j, t);
    next_arrival_[j] = t + spec_.arrival[j].sample(arrival_rng_[j]) / spec_.alpha(j);
  }

  void depart(Index j, double t) {
    --z_(j);
    ++departures_(j);
    busy_[j] = false;
    busy_acc_(j) += t - busy_since_(j);
    next_departure_[j] = kNever;
    if (z_(j) > 0) start_service(j, t);

    const double u = routing_rng_[j].uniform();
    const auto& cum = cumulative_[j];
    for (Index k = 0; k < J_; ++k) {
      if (u <= cum[k]) {
        ++routed_(k);
        enqueue(k, t);
        break;
      }
    }
  }

  void audit() {
    for (Index j = 0; j < J_; ++j) {
      if (busy_[j] != (z_(j) > 0)) ++violations_;
    }
  }

  void record(SimOutput& out, Index n, double t) {
    for (Index j = 0; j < J_; ++j) {
      const double busy = busy_acc_(j) + (busy_[j] ? t - busy_since_(j) : 0.0);
      out.queue_lengths(n, j) = z_(j);
      out.busy_times(n, j) = busy;
      out.idle_regulator(n, j) = mu_(j) * (t - busy);
      out.queue_integrals(n, j) = integral_(j) + static_cast<double>(z_(j)) * (t - last_time_);
      out.external_arrivals(n, j) = arrivals_(j);
      out.routed_in(n, j) = routed_(j);
      out.departures(n, j) = departures_(j);
    }
  }

  const NetworkSpec& spec_;
  SimOptions options_;
  Index J_;
  Vector mu_;
  CountVector z_, arrivals_, routed_, departures_;
  Vector busy_acc_, busy_since_, integral_;
  std::vector<bool> busy_;
  std::vector<double> next_arrival_, next_departure_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<Rng> arrival_rng_, service_rng_, routing_rng_;
  double last_time_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t violations_ = 0;
};

}  // namespace

SimOutput simulate(const NetworkSpec& spec, double r, const CountVector& z0, double horizon,
                   const Vector& observation_times, std::uint64_t seed, const SimOptions& options) {
  require_valid(spec);
  const Index J = spec.stations();
  if (z0.size() != J) throw Error(ErrorKind::InvalidArgument, "initial queue vector has wrong length");
  if ((z0.array() < 0).any()) throw Error(ErrorKind::InvalidArgument, "initial queue lengths must be nonnegative");
  if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  for (Index n = 0; n < observation_times.size(); ++n) {
    const double t = observation_times(n);
    if (t < 0.0 || t > horizon || (n > 0 && t < observation_times(n - 1))) {
      throw Error(ErrorKind::InvalidArgument, "observation times must be sorted and inside [0, horizon]");
    }
  }
  Engine engine(spec, r, z0, seed, options);
  return engine.run(horizon, observation_times, r);
}

std::vector<Index> flow_conservation_failures(const SimOutput& out) {
  std::vector<Index> bad;
  for (Index n = 0; n < out.queue_lengths.rows(); ++n) {
    const CountVector rhs = out.initial + out.external_arrivals.row(n).transpose() +
                            out.routed_in.row(n).transpose() - out.departures.row(n).transpose();
    if (rhs != out.queue_lengths.row(n).transpose()) bad.push_back(n);
  }
  return bad;
}

CountVector matching_initial(const ScaleRegime& regime, const Vector& xi, double r) {
  const Vector g = regime.station_gamma(r);
  if (xi.size() != g.size()) throw Error(ErrorKind::InvalidArgument, "xi has wrong length");
  CountVector z0(g.size());
  for (Index j = 0; j < g.size(); ++j) {
    if (xi(j) < 0.0) throw Error(ErrorKind::InvalidArgument, "xi must be nonnegative");
    z0(j) = static_cast<std::int64_t>(std::ceil(xi(j) / g(j)));
  }
  return z0;
}

Vector observation_grid(const std::vector<double>& scaled_times, const std::vector<double>& gammas) {
  std::vector<double> t;
  for (double g : gammas) {
    for (double s : scaled_times) t.push_back(s / (g * g));
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return Eigen::Map<Vector>(t.data(), static_cast<Index>(t.size()));
}

namespace {

Index find_sample(const Vector& times, double t) {
  const double* begin = times.data();
  const double* end = begin + times.size();
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  const double* it = std::lower_bound(begin, end, t - tol);
  if (it == end || std::abs(*it - t) > tol) {
    throw Error(ErrorKind::GridMismatch, "no observation recorded at real time " + std::to_string(t));
  }
  return static_cast<Index>(it - begin);
}

template <typename Source>
PathGrid scaled(const SimOutput& out, double gamma, const Vector& scaled_times, Source value) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  const Index J = out.queue_lengths.cols();
  PathGrid p{scaled_times, Matrix(scaled_times.size(), J)};
  for (Index n = 0; n < scaled_times.size(); ++n) {
    const Index row = find_sample(out.sample_times, scaled_times(n) / (gamma * gamma));
    for (Index j = 0; j < J; ++j) p.values(n, j) = gamma * value(row, j);
  }
  return p;
}

}  // namespace

PathGrid scaled_path(const SimOutput& out, double gamma, const Vector& scaled_times) {
  return scaled(out, gamma, scaled_times,
                [&](Index n, Index j) { return static_cast<double>(out.queue_lengths(n, j)); });
}

PathGrid scaled_path(const SimOutput& out, Index block, const ScaleRegime& regime, const Vector& scaled_times) {
  return scaled_path(out, regime.gamma(block, out.r), scaled_times);
}

PathGrid scaled_regulator(const SimOutput& out, double gamma, const Vector& scaled_times) {
  return scaled(out, gamma, scaled_times, [&](Index n, Index j) { return out.idle_regulator(n, j); });
}

StationarySample stationary_sample(const NetworkSpec& spec, double r, std::uint64_t seed, double burn_in,
                                   Index batches, double batch_len, const SimOptions& options) {
  if (batches < 1 || !(batch_len > 0.0) || burn_in < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "need burn_in >= 0, batches >= 1, batch_len > 0");
  }
  const Vector rho = solve_traffic(spec).cwiseQuotient(service_rates(spec, r));
  if ((rho.array() >= 1.0).any()) throw Error(ErrorKind::InvalidArgument, "network is not stable at this r");

  Vector obs(batches + 1);
  for (Index b = 0; b <= batches; ++b) obs(b) = burn_in + static_cast<double>(b) * batch_len;
  const SimOutput out =
      simulate(spec, r, CountVector::Zero(spec.stations()), obs(batches), obs, seed, options);

  const Vector g = spec.regime.station_gamma(r);
  StationarySample s;
  s.boundary.resize(batches, spec.stations());
  s.batch_means.resize(batches, spec.stations());
  for (Index b = 0; b < batches; ++b) {
    for (Index j = 0; j < spec.stations(); ++j) {
      s.boundary(b, j) = g(j) * static_cast<double>(out.queue_lengths(b + 1, j));
      s.batch_means(b, j) = g(j) * (out.queue_integrals(b + 1, j) - out.queue_integrals(b, j)) / batch_len;
    }
  }
  s.event_count = out.event_count;
  return s;
}

}  // namespace gjn
