#include "doctest.h"

#include <cmath>

#include "gjn/error.hpp"
#include "gjn/verify.hpp"
#include "support/random_networks.hpp"

using namespace gjn;

namespace {

std::vector<double> exponential_sample(Rng& rng, Index n, double rate) {
  std::vector<double> out(n);
  for (auto& x : out) x = rng.exponential() / rate;
  return out;
}

}  // namespace

TEST_CASE("ks_exponential accepts its own law") {
  Rng rng(11);
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) passes += ks_exponential(exponential_sample(rng, 500, 2.0), 2.0).passed();
  CHECK(passes >= 95);

  std::vector<double> unif(500);
  for (auto& u : unif) u = rng.uniform();
  const TestResult bad = ks_exponential(unif, 1.0);
  CHECK(bad.verdict == Verdict::Fail);
  CHECK(bad.p_value.value() < 0.01);

  CHECK_THROWS_AS(ks_exponential(exponential_sample(rng, 99, 1.0), 1.0), Error);
}

TEST_CASE("independence_test") {
  Rng rng(12);
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::vector<double>> s(2, std::vector<double>(500));
    for (auto& col : s)
      for (auto& x : col) x = rng.normal();
    passes += independence_test(s, {{0, 1}}).passed();
  }
  CHECK(passes >= 95);

  std::vector<std::vector<double>> coupled(3, std::vector<double>(500));
  for (std::size_t n = 0; n < 500; ++n) {
    coupled[0][n] = rng.normal();
    coupled[1][n] = coupled[0][n] + 0.5 * rng.normal();
    coupled[2][n] = rng.normal();
  }
  const TestResult t = independence_test(coupled, {{0, 1}});
  CHECK(t.verdict == Verdict::Fail);
  CHECK(t.statistic > 0.5);
  CHECK_FALSE(t.interval->contains(0.0));
  CHECK(t.detail.find("spearman") != std::string::npos);
}

TEST_CASE("verdict strings") {
  CHECK(to_string(Verdict::Pass) == "pass");
  CHECK(to_string(Verdict::TrendFail) == "trend-fail");
  CHECK(to_string(Verdict::NotApplicable) == "not-applicable");
}

TEST_CASE("absorption oracle") {
  Matrix P(2, 2);
  P << 0, 1, 0, 0;
  const AbsorptionEstimate t = absorption_oracle(P, 20000, 3);
  CHECK(t.w(0, 1) == 1.0);
  CHECK(t.w(0, 0) == 0.0);
  CHECK(t.w(1, 1) == 0.0);
  CHECK(t.chains == 20000);

  const AbsorptionEstimate zero = absorption_oracle(Matrix::Zero(3, 3), 1000, 3);
  CHECK(zero.w.isZero(0.0));
  CHECK(zero.standard_error.isZero(0.0));

  Rng rng(5);
  const Matrix R = testing::random_routing(3, rng);
  const AbsorptionEstimate est = absorption_oracle(R, 40000, 9);
  const Matrix exact = w_matrix(R);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      const double se = std::sqrt(exact(i, j) * (1 - exact(i, j)) / 40000.0);
      CHECK(std::abs(est.w(i, j) - exact(i, j)) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("variance identity audit") {
  std::vector<NetworkSpec> specs;
  for (std::uint64_t s = 0; s < 20; ++s) specs.push_back(testing::random_network(1 + s % 5, s));
  NetworkSpec det = testing::mm1();
  det.arrival[0] = DistributionSpec::deterministic();
  det.service[0] = DistributionSpec::deterministic();
  specs.push_back(det);
  const TestResult audit = variance_identity_audit(specs);
  CHECK(audit.verdict == Verdict::Pass);
  CHECK(audit.statistic <= 1e-10);
  CHECK(audit.replications == static_cast<Index>(specs.size()));
}

TEST_CASE("prelimit initial state") {
  const ScaleRegime scales = ScaleRegime::singletons({1.0, 2.0});
  const Vector xi = Vector::Ones(2);
  const Vector m = prelimit_initial(scales, Regime::Matching, xi, 0.1);
  CHECK(m(0) == doctest::Approx(10.0));
  CHECK(m(1) == doctest::Approx(100.0));
  const Vector l = prelimit_initial(scales, Regime::Lowest, xi, 0.1);
  CHECK(l(1) == doctest::Approx(10.0));
}

TEST_CASE("r grid validation") {
  CHECK_NOTHROW(require_r_grid({0.3, 0.1}));
  CHECK_THROWS_AS(require_r_grid({0.1, 0.3}), Error);
  CHECK_THROWS_AS(require_r_grid({1.0, 0.1}), Error);
  CHECK_THROWS_AS(require_r_grid({}), Error);
}

TEST_CASE("scale separation needs two blocks") {
  const LimitModel m = LimitModel::from_network(testing::mm1());
  const TestResult t = scale_separation_check(m, {0}, {0.3, 0.1}, Vector::Ones(1), 1.0, 10, 1, RunOptions{});
  CHECK(t.verdict == Verdict::NotApplicable);
  CHECK(t.passed());
}

TEST_CASE("M/M/1 functional limit") {
  const LimitModel m = LimitModel::from_network(testing::mm1());
  RunOptions opts;
  opts.step = 1e-2;
  const auto results =
      functional_limit_check(m, Regime::Matching, Source::Gjn, {0}, {0.3, 0.1}, {1.0}, Vector::Ones(1), 300, 17, opts);
  REQUIRE(results.size() == 2);
  CHECK(results[0].name == "functional_limit[matching,station=1,t=1]");
  CHECK(results[0].verdict == Verdict::Pass);
  CHECK(results[0].replications == 300);
  CHECK(results[1].sweeps.size() == 1);
  CHECK(results[1].sweeps[0].values.size() == 2);

  // Worker count does not change the numbers.
  opts.workers = 3;
  const auto again =
      functional_limit_check(m, Regime::Matching, Source::Gjn, {0}, {0.3, 0.1}, {1.0}, Vector::Ones(1), 300, 17, opts);
  CHECK(again[0].statistic == results[0].statistic);
  CHECK(again[1].sweeps[0].values == results[1].sweeps[0].values);
}

TEST_CASE("SRBM source samples start at xi") {
  const LimitModel m = LimitModel::from_network(testing::tandem());
  const Vector xi(Vector::Constant(2, 0.7));
  const auto s = prelimit_samples(m, Regime::Matching, Source::Srbm, 0.2, xi, {0.0, 0.5}, 5, 1, RunOptions{});
  REQUIRE(s.size() == 2);
  CHECK((s[0].rowwise() - xi.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((s[1].array() >= -1e-12).all());
}
