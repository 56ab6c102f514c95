#include "doctest.h"

#include <cmath>

#include "gjn/error.hpp"
#include "gjn/random.hpp"
#include "gjn/skorokhod.hpp"

using namespace gjn;

namespace {

Matrix sym_R() {
  Matrix R(2, 2);
  R << 1, -0.5, -0.5, 1;
  return R;
}

PathGrid line(double a, double b, Index steps = 100) {
  PathGrid p = PathGrid::uniform(1.0, steps, 1);
  p.values.col(0) = a * Vector::Ones(steps + 1) + b * p.times;
  return p;
}

// Piecewise-linear path through random knots, starting at x0.
PathGrid random_path(Rng& rng, Index d, Index steps, const Vector& x0) {
  PathGrid p = PathGrid::uniform(1.0, steps, d);
  const Index knots = 10;
  Matrix k(knots + 1, d);
  k.row(0) = x0.transpose();
  for (Index i = 1; i <= knots; ++i) {
    for (Index j = 0; j < d; ++j) k(i, j) = k(i - 1, j) + 2.0 * (rng.uniform() - 0.55);
  }
  for (Index n = 0; n <= steps; ++n) {
    const double s = p.times(n) * knots;
    const Index i = std::min<Index>(static_cast<Index>(s), knots - 1);
    const double f = s - static_cast<double>(i);
    p.values.row(n) = (1 - f) * k.row(i) + f * k.row(i + 1);
  }
  return p;
}

double sup(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

void check_invariants(const PathGrid& x, const Matrix& R, const Reflection& out) {
  CHECK(out.z.values.minCoeff() >= -1e-12);
  CHECK(sup(out.z.values - x.values - out.y.values * R.transpose()) <= 1e-9);
  CHECK(sup(out.y.values.row(0)) == 0.0);
  for (Index n = 1; n < out.y.points(); ++n) {
    CHECK((out.y.values.row(n) - out.y.values.row(n - 1)).minCoeff() >= -1e-12);
  }
  CHECK(out.complementarity_residual <= 1e-8);
}

}  // namespace

TEST_CASE("one-dimensional map on simple paths") {
  const Reflection push = reflect_1d(line(0.0, -1.0));
  CHECK(sup(push.z.values) <= 1e-15);
  CHECK(sup(push.y.values - push.z.times) <= 1e-15);

  const PathGrid v = line(1.0, -2.0);
  const Reflection vr = reflect_1d(v);
  for (Index n = 0; n < v.points(); ++n) {
    const double t = v.times(n);
    CHECK(vr.z.values(n, 0) == doctest::Approx(std::max(1 - 2 * t, 0.0)));
    CHECK(vr.y.values(n, 0) == doctest::Approx(std::max(2 * t - 1, 0.0)));
  }

  const PathGrid up = line(0.0, 1.0);
  const Reflection ur = reflect_1d(up);
  CHECK(ur.z.values == up.values);
  CHECK(ur.y.values.isZero(0.0));

  try {
    reflect_1d(line(-0.1, 0.0));
    FAIL("expected NegativeStart");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeStart);
  }
}

TEST_CASE("kappa") {
  CHECK(kappa(Matrix(Matrix::Identity(2, 2))) == 1.0);
  CHECK(kappa(sym_R()) == 1.5);
  Matrix tandem(2, 2);
  tandem << 1, 0, -1, 1;
  CHECK(kappa(tandem) == 2.0);
}

TEST_CASE("multidimensional map reduces to the scalar map") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const PathGrid x = random_path(rng, 1, 500, Vector::Constant(1, rng.uniform()));
    const Reflection a = reflect_1d(x);
    const Reflection b = reflect_md(x, Matrix::Identity(1, 1));
    CHECK(sup(a.z.values - b.z.values) <= 1e-12);
    CHECK(sup(a.y.values - b.y.values) <= 1e-12);
  }
  const PathGrid x2 = random_path(rng, 3, 400, Vector::Zero(3));
  const Reflection decoupled = reflect_md(x2, Matrix::Identity(3, 3));
  for (Index j = 0; j < 3; ++j) {
    const Reflection one = reflect_1d(x2.select({j}));
    CHECK(sup(one.z.values.col(0) - decoupled.z.values.col(j)) <= 1e-12);
  }
}

TEST_CASE("interior paths are untouched") {
  PathGrid x = PathGrid::uniform(1.0, 50, 2);
  x.values.col(0).setConstant(0.3);
  x.values.col(1).setConstant(2.0);
  const Reflection out = reflect_md(x, sym_R());
  CHECK(out.y.values.isZero(0.0));
  CHECK(out.z.values == x.values);
}

TEST_CASE("reflection invariants on random paths") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const PathGrid x = random_path(rng, 2, 300, Vector::Zero(2));
    check_invariants(x, sym_R(), reflect_md(x, sym_R()));
    Matrix scaled = sym_R();
    scaled.col(1) *= 3.0;  // non-unit diagonal
    check_invariants(x, scaled, reflect_md(x, scaled));
  }
}

TEST_CASE("kappa does not bound either map") {
  // One dimension, R = [1]: x falls to -0.5 and climbs to 0.5, so z ends at 1
  // while sup |x| = 0.5.
  PathGrid x = PathGrid::uniform(1.0, 100, 1);
  for (Index n = 0; n <= 100; ++n) {
    const double t = x.times(n);
    x.values(n, 0) = t <= 0.5 ? -t : 2.0 * t - 1.5;
  }
  const Matrix one = Matrix::Identity(1, 1);
  CHECK(sup(reflect_md(x, one).z.values) / sup(x.values) == doctest::Approx(2.0));
  CHECK(kappa(one) == 1.0);

  // x = -(t, t) forces y = (2t, 2t): ratio 2 against kappa = 1.5.
  PathGrid x2 = PathGrid::uniform(1.0, 100, 2);
  x2.values.col(0) = -x2.times;
  x2.values.col(1) = -x2.times;
  CHECK(sup(reflect_md(x2, sym_R()).y.values) / sup(x2.values) == doctest::Approx(2.0));
}

TEST_CASE("maps obey the bounds from the regulator fixed point") {
  // With unit diagonal and Q = I - R: |dy| <= (I - Q)^{-1} 1 |dx| entrywise,
  // and z = x + R y adds kappa(R) times that.
  Rng rng(23);
  const Matrix R = sym_R();
  const double ly = kappa(Matrix(R.inverse()));
  const double lz = 1.0 + kappa(R) * ly;
  for (int pair = 0; pair < 50; ++pair) {
    const PathGrid x = random_path(rng, 2, 400, Vector::Zero(2));
    PathGrid x2 = random_path(rng, 2, 400, Vector::Zero(2));
    x2.values = x.values + 0.3 * (x2.values - x.values);
    const double dx = sup(x.values - x2.values);
    const Reflection a = reflect_md(x, R), b = reflect_md(x2, R);
    CHECK(sup(a.y.values - b.y.values) <= ly * dx + 1e-9);
    CHECK(sup(a.z.values - b.z.values) <= lz * dx + 1e-9);
  }
}

TEST_CASE("stepper reproduces the path fixed point") {
  Rng rng(5);
  Matrix R = sym_R();
  R(1, 1) = 2.0;
  for (int trial = 0; trial < 10; ++trial) {
    const PathGrid x = random_path(rng, 2, 300, Vector::Constant(2, 0.1));
    const Reflection global = reflect_md(x, R);
    ReflectionStepper stepper(R);
    for (Index n = 0; n < x.points(); ++n) {
      const Vector xn = x.values.row(n).transpose();
      stepper.step(xn);
      CHECK((stepper.z() - global.z.values.row(n).transpose()).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((stepper.y() - global.y.values.row(n).transpose()).cwiseAbs().maxCoeff() <= 1e-8);
    }
    CHECK(stepper.complementarity_residual() <= 1e-8);
  }
}

TEST_CASE("non-convergence is an error") {
  Matrix R(2, 2);
  R << 1, -0.999, -0.999, 1;
  PathGrid x = PathGrid::uniform(1.0, 20, 2);
  x.values.col(0) = -x.times;
  x.values.col(1) = -x.times;
  try {
    reflect_md(x, R, ReflectOptions{1e-10, 50});
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoConvergence);
  }
  Matrix bad(2, 2);
  bad << 1, -2, -2, 1;
  CHECK_THROWS_AS(reflect_md(x, bad), Error);
}

TEST_CASE("grid refinement changes shrink on a Brownian path") {
  const Index fine = 1 << 14;
  Rng rng(99);
  Vector w(fine + 1);
  w(0) = 0.0;
  for (Index n = 1; n <= fine; ++n) w(n) = w(n - 1) + std::sqrt(1.0 / fine) * rng.normal();
  auto at = [&](Index steps) {
    PathGrid p = PathGrid::uniform(1.0, steps, 1);
    for (Index n = 0; n <= steps; ++n) p.values(n, 0) = w(n * (fine / steps)) - 0.5 * p.times(n);
    return reflect_1d(p);
  };
  auto change = [&](Index coarse) {
    const Reflection a = at(coarse), b = at(2 * coarse);
    double d = 0.0;
    for (Index n = 0; n <= coarse; ++n) d = std::max(d, std::abs(a.z.values(n, 0) - b.z.values(2 * n, 0)));
    return d;
  };
  CHECK(change(1 << 13) < change(1 << 6));
}

TEST_CASE("boundary path families") {
  BoundaryScenario flat;
  const BoundaryCheck a = check_boundary_paths(flat);
  CHECK(a.converging);
  for (double s : a.sup_norms) CHECK(s == 0.0);

  BoundaryScenario wave;
  wave.u = [](double, double t) { return 0.5 * std::sin(6.0 * t) + 0.2 * std::sin(17.0 * t); };
  const BoundaryCheck b = check_boundary_paths(wave);
  CHECK(b.converging);
  CHECK(b.sup_norms.front() > 0.0);

  BoundaryScenario offset;
  offset.kind = BoundaryScenario::Kind::PositiveOffset;
  offset.u = [](double, double t) { return std::sin(5.0 * t); };
  offset.v = [](double, double t) { return 2.0 * t; };
  const BoundaryCheck c = check_boundary_paths(offset);
  CHECK(c.converging);
  CHECK(c.sup_norms.back() == 0.0);
}
