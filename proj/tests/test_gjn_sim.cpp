#include "doctest.h"

#include <cmath>

#include "gjn/error.hpp"
#include "gjn/gjn_sim.hpp"
#include "gjn/stats.hpp"
#include "support/random_networks.hpp"

using namespace gjn;

namespace {

NetworkSpec dd1() {
  NetworkSpec spec = testing::mm1();
  spec.arrival[0] = DistributionSpec::deterministic();
  spec.service[0] = DistributionSpec::deterministic();
  return spec;
}

Vector grid(double horizon, Index n) { return Vector::LinSpaced(n + 1, 0.0, horizon); }

void check_invariants(const SimOutput& out) {
  CHECK(flow_conservation_failures(out).empty());
  CHECK((out.queue_lengths.array() >= 0).all());
  for (Index n = 0; n < out.sample_times.size(); ++n) {
    CHECK((out.busy_times.row(n).array() <= out.sample_times(n) + 1e-9).all());
    if (n > 0) {
      CHECK((out.busy_times.row(n) - out.busy_times.row(n - 1)).minCoeff() >= -1e-9);
      CHECK((out.idle_regulator.row(n) - out.idle_regulator.row(n - 1)).minCoeff() >= -1e-9);
    }
  }
  CHECK(out.work_conservation_violations == 0);
}

}  // namespace

TEST_CASE("deterministic D/D/1 trace") {
  // Interarrival 1 and service 0.5: the block drift b = 1 / r gives mu = 2.
  // Arrivals come at 1, 2, ..., so the tenth job arrives at t = 10 and
  // leaves at 10.5.
  NetworkSpec spec = dd1();
  const double r = 0.5;
  spec.regime.blocks[0].drift(0) = 1.0 / r;
  SimOptions audit;
  audit.audit = true;
  Vector obs(5);
  obs << 1.0, 1.5, 9.75, 10.0, 10.5;
  const SimOutput out = simulate(spec, r, CountVector::Zero(1), 10.5, obs, 1, audit);
  CHECK(out.service_rates(0) == doctest::Approx(2.0));
  // Right-continuous: the arrival at t = 1 is counted at t = 1.
  CHECK(out.queue_lengths(0, 0) == 1);
  CHECK(out.queue_lengths(1, 0) == 0);
  CHECK(out.external_arrivals(2, 0) == 9);
  CHECK(out.busy_times(2, 0) == doctest::Approx(4.5));
  CHECK(out.queue_lengths(3, 0) == 1);
  CHECK(out.queue_lengths(4, 0) == 0);
  CHECK(out.external_arrivals(4, 0) == 10);
  CHECK(out.departures(4, 0) == 10);
  CHECK(out.busy_times(4, 0) == doctest::Approx(5.0));
  CHECK(out.idle_regulator(4, 0) == doctest::Approx(2.0 * (10.5 - 5.0)));
  check_invariants(out);
}

TEST_CASE("flow identity with initial backlog") {
  NetworkSpec spec = testing::mm1();
  spec.regime.blocks[0].drift(0) = 10.0;
  SimOptions audit;
  audit.audit = true;
  const SimOutput out = simulate(spec, 0.5, CountVector::Constant(1, 3), 50.0, grid(50.0, 500), 4, audit);
  check_invariants(out);
  CHECK(out.queue_lengths(0, 0) == 3);
}

TEST_CASE("tandem at matching-rate start satisfies all invariants") {
  const NetworkSpec spec = testing::tandem();
  const double r = 0.1;
  const CountVector z0 = matching_initial(spec.regime, Vector::Ones(2), r);
  CHECK(z0(0) == 10);
  CHECK(z0(1) == 100);
  SimOptions audit;
  audit.audit = true;
  const SimOutput out = simulate(spec, r, z0, 1000.0, grid(1000.0, 1000), 9, audit);
  check_invariants(out);
}

TEST_CASE("random general networks satisfy all invariants") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const NetworkSpec spec = testing::random_network(2 + s % 4, 40 + s);
    SimOptions audit;
    audit.audit = true;
    const SimOutput out = simulate(spec, 0.3, CountVector::Constant(spec.stations(), 2), 200.0, grid(200.0, 400),
                                   s, audit);
    check_invariants(out);
  }
}

TEST_CASE("determinism") {
  const NetworkSpec spec = testing::random_network(3, 8);
  const SimOutput a = simulate(spec, 0.2, CountVector::Zero(3), 100.0, grid(100.0, 50), 77);
  const SimOutput b = simulate(spec, 0.2, CountVector::Zero(3), 100.0, grid(100.0, 50), 77);
  CHECK(a.queue_lengths == b.queue_lengths);
  CHECK(a.busy_times == b.busy_times);
  CHECK(a.event_count == b.event_count);
  const SimOutput c = simulate(spec, 0.2, CountVector::Zero(3), 100.0, grid(100.0, 50), 78);
  CHECK(c.queue_lengths != a.queue_lengths);
}

TEST_CASE("event cap and argument checks") {
  const NetworkSpec spec = testing::mm1();
  SimOptions small;
  small.event_cap = 100;
  try {
    simulate(spec, 0.1, CountVector::Zero(1), 1e4, grid(1e4, 10), 1, small);
    FAIL("expected EventOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EventOverflow);
  }
  CHECK_THROWS_AS(simulate(spec, 0.1, CountVector::Constant(1, -1), 1.0, grid(1.0, 1), 1), Error);
  CHECK_THROWS_AS(simulate(spec, 0.1, CountVector::Zero(1), 1.0, grid(2.0, 1), 1), Error);
}

TEST_CASE("scaled paths") {
  const NetworkSpec spec = testing::tandem();
  const double r = 0.1;
  const Vector scaled = Vector::LinSpaced(11, 0.0, 1.0);
  const std::vector<double> st(scaled.data(), scaled.data() + scaled.size());
  const Vector obs = observation_grid(st, {spec.regime.gamma(0, r), spec.regime.gamma(1, r)});
  CHECK(obs(obs.size() - 1) == doctest::Approx(1e4));
  const SimOutput out = simulate(spec, r, matching_initial(spec.regime, Vector::Ones(2), r), obs(obs.size() - 1),
                                 obs, 3);

  const PathGrid p = scaled_path(out, 0, spec.regime, scaled);
  // Block 1 at r = 0.1: time factor 100, space factor 0.1.
  Index row100 = -1;
  for (Index n = 0; n < obs.size(); ++n) {
    if (std::abs(obs(n) - 100.0) < 1e-9) row100 = n;
  }
  REQUIRE(row100 >= 0);
  CHECK(p.values(10, 0) == doctest::Approx(0.1 * static_cast<double>(out.queue_lengths(row100, 0))));
  CHECK(p.values(0, 0) == doctest::Approx(1.0));

  const PathGrid id = scaled_path(out, 1.0, Vector::LinSpaced(2, 0.0, 100.0));
  CHECK(id.values(1, 1) == static_cast<double>(out.queue_lengths(row100, 1)));

  try {
    scaled_path(out, 0, spec.regime, Vector::Constant(1, 0.55));
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridMismatch);
  }
  CHECK_THROWS_AS(scaled_path(out, 0, spec.regime, Vector::Constant(1, 2.0)), Error);
}

TEST_CASE("stationary sampling") {
  const SimOptions none;
  const StationarySample dd = stationary_sample(dd1(), 0.2, 1, 10.9, 20, 5.0, none);
  CHECK(dd.boundary.maxCoeff() == 0.0);
  CHECK(dd.batch_means.maxCoeff() < 0.2 * 1.0 + 1e-12);

  const StationarySample tandem = stationary_sample(testing::tandem(), 0.3, 2, 2000.0, 20, 500.0, none);
  CHECK(tandem.batch_means.colwise().mean().minCoeff() > 0.0);
  CHECK(std::isfinite(tandem.batch_means.maxCoeff()));

  NetworkSpec unstable = testing::mm1();
  unstable.regime.blocks[0].drift(0) = -0.1;
  CHECK_THROWS_AS(stationary_sample(unstable, 0.5, 1, 1.0, 2, 1.0, none), Error);
}

TEST_CASE("more idle capacity lowers the M/M/1 queue") {
  // Sign test over 20 seeds: r = 0.2 against r = 0.1, same seeds.
  const NetworkSpec spec = testing::mm1();
  int lower = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double q1 = stationary_sample(spec, 0.1, s, 500.0, 1, 20000.0).batch_means(0, 0) / 0.1;
    const double q2 = stationary_sample(spec, 0.2, s, 500.0, 1, 20000.0).batch_means(0, 0) / 0.2;
    if (q2 < q1) ++lower;
  }
  // P(at least 15 of 20 | p = 1/2) < 0.05
  CHECK(lower >= 15);
}
