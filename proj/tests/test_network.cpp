#include "doctest.h"

#include <cmath>

#include "gjn/error.hpp"
#include "gjn/json_util.hpp"
#include "gjn/network.hpp"
#include "gjn/network_json.hpp"
#include "support/random_networks.hpp"

using namespace gjn;

TEST_CASE("distribution families are unit-mean with analytic scv") {
  CHECK(DistributionSpec::exponential().scv() == doctest::Approx(1.0));
  CHECK(DistributionSpec::deterministic().scv() == 0.0);
  CHECK(DistributionSpec::uniform(2.0, 6.0).scv() == doctest::Approx(16.0 / 12.0 / 16.0));
  CHECK(DistributionSpec::erlang(4).scv() == doctest::Approx(0.25));
  CHECK(DistributionSpec::lognormal(0.5).scv() == doctest::Approx(std::expm1(0.25)));

  const std::vector<DistributionSpec> laws{
      DistributionSpec::exponential(),           DistributionSpec::deterministic(),
      DistributionSpec::uniform(2.0, 6.0),       DistributionSpec::erlang(3),
      DistributionSpec::hyperexponential({0.2, 0.8}, {0.5, 4.0}), DistributionSpec::lognormal(0.8)};
  for (const auto& law : laws) {
    Rng rng(derive_seed(11, 0, static_cast<std::uint64_t>(law.family())));
    double sum = 0.0, sq = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
      const double v = law.sample(rng);
      sum += v;
      sq += v * v;
    }
    const double m = sum / n;
    CAPTURE(to_string(law.family()));
    CHECK(std::abs(m - 1.0) < 0.005);
    CHECK(sq / n - m * m == doctest::Approx(law.scv()).epsilon(0.05).scale(1.0));
  }
}

TEST_CASE("bad distribution parameters are rejected") {
  CHECK_THROWS_AS(DistributionSpec::uniform(3.0, 1.0), Error);
  CHECK_THROWS_AS(DistributionSpec::erlang(0), Error);
  CHECK_THROWS_AS(DistributionSpec::hyperexponential({0.5, 0.4}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(DistributionSpec::lognormal(0.0), Error);
  CHECK_THROWS_AS(family_from_string("pareto"), Error);
}

TEST_CASE("derived seeds differ across streams and replications") {
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  Rng a(derive_seed(5, 0, 0)), b(derive_seed(5, 0, 0));
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("solve_traffic on simple networks") {
  NetworkSpec none = testing::exponential_network(Matrix::Zero(2, 2), Vector::Ones(2), ScaleRegime::fully_multiscale(2));
  CHECK(solve_traffic(none).isApprox(Vector::Ones(2)));
  CHECK(solve_traffic(testing::tandem()).isApprox(Vector::Ones(2)));
}

TEST_CASE("solve_traffic matches fixed-point iteration on random networks") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const NetworkSpec spec = testing::random_network(4, 100 + s);
    const Vector lambda = solve_traffic(spec);
    Vector it = spec.alpha;
    for (int n = 0; n < 2000; ++n) it = spec.alpha + spec.routing.transpose() * it;
    CHECK((lambda - it).cwiseAbs().maxCoeff() <= 1e-10);
    const Vector residual = lambda - spec.alpha - spec.routing.transpose() * lambda;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-12 * lambda.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("solve_traffic errors") {
  Matrix closed(2, 2);
  closed << 0, 1, 1, 0;
  NetworkSpec spec = testing::exponential_network(closed, Vector::Ones(2), ScaleRegime::fully_multiscale(2));
  try {
    solve_traffic(spec);
    FAIL("expected SingularRouting");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularRouting);
  }
  NetworkSpec dead = testing::exponential_network(Matrix::Zero(2, 2), Vector::Unit(2, 0), ScaleRegime::fully_multiscale(2));
  try {
    solve_traffic(dead);
    FAIL("expected DeadStation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DeadStation);
  }
}

TEST_CASE("service rates and idle rates") {
  const NetworkSpec spec = testing::tandem({1.0, 2.0});
  const Vector mu = service_rates(spec, 0.1);
  CHECK(mu(0) == doctest::Approx(1.1));
  CHECK(mu(1) == doctest::Approx(1.01));
  const Vector lambda = solve_traffic(spec);
  const Vector idle = Vector::Ones(2) - lambda.cwiseQuotient(mu);
  CHECK(idle.isApprox(spec.regime.idle_rates(0.1).cwiseQuotient(mu)));
  CHECK((service_rates(spec, 0.05).array() <= service_rates(spec, 0.1).array()).all());
  CHECK_THROWS_AS(service_rates(spec, 1.0), Error);

  const ScaleRegime s = spec.regime;
  CHECK(s.gamma(1, 0.1) / s.gamma(0, 0.1) < s.gamma(1, 0.2) / s.gamma(0, 0.2));
}

TEST_CASE("six-station example groups stations into three blocks") {
  // 1 - rho = (r, 2r, 3r^2, 2r^2, r^2, 2r^3) with lambda = 1 per station.
  ScaleRegime regime;
  Vector b1(2), b2(3), b3(1);
  b1 << 1, 2;
  b2 << 3, 2, 1;
  b3 << 2;
  regime.blocks = {Block{0, 1, 1.0, b1}, Block{2, 4, 2.0, b2}, Block{5, 5, 3.0, b3}};
  NetworkSpec spec = testing::exponential_network(Matrix::Zero(6, 6), Vector::Ones(6), regime);
  CHECK(validate(spec).ok());
  const double r = 0.01;
  const Vector mu = service_rates(spec, r);
  const Vector idle = Vector::Ones(6) - mu.cwiseInverse();
  Vector expected(6);
  expected << r, 2 * r, 3 * r * r, 2 * r * r, r * r, 2 * r * r * r;
  CHECK((idle - expected.cwiseQuotient(mu)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(regime.block_of(3) == 1);
}

TEST_CASE("validate reports each issue") {
  Matrix P = Matrix::Zero(3, 3);
  P(2, 0) = 0.6;
  P(2, 1) = 0.6;
  NetworkSpec spec = testing::exponential_network(P, Vector::Ones(3), ScaleRegime::fully_multiscale(3));
  ValidationReport report = validate(spec);
  REQUIRE_FALSE(report.ok());
  CHECK(report.summary().find("routing row 3 exceeds 1") != std::string::npos);

  NetworkSpec swapped = testing::tandem({2.0, 1.0});
  CHECK(validate(swapped).summary().find("exponents not increasing") != std::string::npos);
  CHECK(validate(testing::tandem()).ok());
  CHECK_THROWS_AS(require_valid(swapped), Error);
}

TEST_CASE("network JSON round trip and key-path errors") {
  const std::string text = R"({
    "J": 2, "P": [[0, 1], [0, 0]], "alpha": [1, 0],
    "arrival_dists": ["exponential", {"family": "erlang", "params": {"k": 2}}],
    "service_dists": [{"family": "uniform", "params": {"lo": 1, "hi": 3}}, "deterministic"],
    "blocks": [{"stations": [1, 1], "exponent": 1}, {"stations": [2, 2], "exponent": 2, "b": [0.5]}]
  })";
  const NetworkSpec spec = network_from_json(json_util::parse(text, "inline"));
  CHECK(validate(spec).ok());
  CHECK(spec.regime.blocks[1].drift(0) == 0.5);
  CHECK(spec.service[0].scv() == doctest::Approx(1.0 / 12.0));

  const NetworkSpec again = network_from_json(to_json(spec));
  CHECK(again.routing == spec.routing);
  CHECK(again.service[0].scv() == doctest::Approx(spec.service[0].scv()));
  CHECK(again.arrival[1].scv() == doctest::Approx(0.5));

  nlohmann::json broken = json_util::parse(text, "inline");
  broken["blocks"][1].erase("exponent");
  try {
    network_from_json(broken);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("network.blocks[1].exponent") != std::string::npos);
  }
  try {
    json_util::parse("{\n  \"J\": 2,\n  oops\n}", "cfg.json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cfg.json:3:") != std::string::npos);
  }
}
