#include "gjn/skorokhod.hpp"

#include <algorithm>

#include "gjn/error.hpp"
#include "gjn/limit_calculus.hpp"
#include "gjn/stats.hpp"

namespace gjn {

PathGrid PathGrid::uniform(double horizon, Index steps, Index dimension) {
  PathGrid p;
  p.times = Vector::LinSpaced(steps + 1, 0.0, horizon);
  p.values = Matrix::Zero(steps + 1, dimension);
  return p;
}

PathGrid PathGrid::select(const std::vector<Index>& coords) const {
  PathGrid out{times, Matrix(points(), static_cast<Index>(coords.size()))};
  for (std::size_t i = 0; i < coords.size(); ++i) out.values.col(static_cast<Index>(i)) = values.col(coords[i]);
  return out;
}

namespace {

constexpr double kOrthantSlack = 1e-12;

void check_start(const PathGrid& x) {
  if (x.points() == 0) throw Error(ErrorKind::InvalidArgument, "empty path");
  if (x.values.rows() != x.points()) throw Error(ErrorKind::InvalidArgument, "path values/times size mismatch");
  if ((x.values.row(0).array() < 0.0).any()) {
    throw Error(ErrorKind::NegativeStart, "driving path starts outside the orthant");
  }
}

double complementarity(const Matrix& z, const Matrix& y) {
  double worst = 0.0;
  for (Index j = 0; j < z.cols(); ++j) {
    double sum = 0.0;
    for (Index n = 1; n < z.rows(); ++n) sum += std::abs(z(n, j)) * (y(n, j) - y(n - 1, j));
    worst = std::max(worst, sum);
  }
  return worst;
}

}  // namespace

Reflection reflect_1d(const PathGrid& x) {
  check_start(x);
  if (x.dimension() != 1) throw Error(ErrorKind::InvalidArgument, "reflect_1d needs a scalar path");
  Reflection out{x, PathGrid{x.times, Matrix::Zero(x.points(), 1)}, 0.0, 1};
  double running = 0.0;
  for (Index n = 0; n < x.points(); ++n) {
    running = std::max(running, -x.values(n, 0));
    out.y.values(n, 0) = running;
    out.z.values(n, 0) = x.values(n, 0) + running;
  }
  out.complementarity_residual = complementarity(out.z.values, out.y.values);
  return out;
}

Reflection reflect_md(const PathGrid& x, const Matrix& R, const ReflectOptions& options) {
  check_start(x);
  const Index d = x.dimension();
  if (R.rows() != d || R.cols() != d) throw Error(ErrorKind::InvalidArgument, "reflection matrix has wrong size");
  if (!is_m_matrix(R)) throw Error(ErrorKind::InvalidArgument, "reflection matrix is not an M-matrix");

  const Vector diag = R.diagonal();
  // Work with unit-diagonal R D^{-1} and the scaled regulator D y.
  const Matrix off = R * diag.cwiseInverse().asDiagonal() - Matrix::Identity(d, d);
  const Index N = x.points();
  Matrix y = Matrix::Zero(N, d);
  Matrix next(N, d);

  int iteration = 0;
  for (;;) {
    if (iteration == options.max_iterations) {
      throw Error(ErrorKind::NoConvergence,
                  "reflection fixed point did not converge in " + std::to_string(options.max_iterations) +
                      " iterations");
    }
    ++iteration;
    next.noalias() = -x.values - y * off.transpose();
    for (Index j = 0; j < d; ++j) {
      double running = 0.0;
      for (Index n = 0; n < N; ++n) {
        running = std::max(running, next(n, j));
        next(n, j) = running;
      }
    }
    const double change = (next - y).cwiseAbs().maxCoeff();
    y.swap(next);
    // A Jacobi step can leave z slightly negative after the last regulator
    // increase; keep going until it is within rounding of the orthant.
    if (change <= options.tol &&
        (x.values + y * (off + Matrix::Identity(d, d)).transpose()).minCoeff() >= -kOrthantSlack) {
      break;
    }
  }

  Reflection out;
  out.iterations = iteration;
  out.z = PathGrid{x.times, x.values + y * (off + Matrix::Identity(d, d)).transpose()};
  out.y = PathGrid{x.times, y * diag.cwiseInverse().asDiagonal()};
  out.complementarity_residual = complementarity(out.z.values, out.y.values);
  return out;
}

ReflectionStepper::ReflectionStepper(const Matrix& R, const ReflectOptions& options)
    : diag_(R.diagonal()), options_(options) {
  const Index d = R.rows();
  if (R.cols() != d || !is_m_matrix(R)) {
    throw Error(ErrorKind::InvalidArgument, "reflection matrix is not an M-matrix");
  }
  off_ = R * diag_.cwiseInverse().asDiagonal() - Matrix::Identity(d, d);
  y_scaled_ = Vector::Zero(d);
  y_next_ = Vector::Zero(d);
  z_ = Vector::Zero(d);
  residual_ = Vector::Zero(d);
}

const Vector& ReflectionStepper::step(const Eigen::Ref<const Vector>& x) {
  const Index d = diag_.size();
  if (!started_) {
    if ((x.array() < 0.0).any()) throw Error(ErrorKind::NegativeStart, "driving path starts outside the orthant");
    started_ = true;
    z_ = x;
    return z_;
  }
  const Vector previous = y_scaled_;
  if (d == 1) {
    y_scaled_(0) = std::max(previous(0), -x(0));
  } else {
    int iteration = 0;
    for (;;) {
      if (iteration == options_.max_iterations) {
        throw Error(ErrorKind::NoConvergence, "per-step reflection fixed point did not converge");
      }
      ++iteration;
      y_next_.noalias() = -x - off_ * y_scaled_;
      y_next_ = y_next_.cwiseMax(previous);
      const double change = (y_next_ - y_scaled_).cwiseAbs().maxCoeff();
      y_scaled_.swap(y_next_);
      if (change <= options_.tol && (x + y_scaled_ + off_ * y_scaled_).minCoeff() >= -kOrthantSlack) break;
    }
    max_used_ = std::max(max_used_, iteration);
  }
  z_.noalias() = x + y_scaled_ + off_ * y_scaled_;
  residual_ += (z_.cwiseAbs().array() * (y_scaled_ - previous).cwiseQuotient(diag_).array()).matrix();
  return z_;
}

double ReflectionStepper::complementarity_residual() const { return residual_.size() ? residual_.maxCoeff() : 0.0; }

BoundaryCheck check_boundary_paths(const BoundaryScenario& s) {
  BoundaryCheck out;
  for (double r : s.r_values) {
    PathGrid x = PathGrid::uniform(s.horizon, s.steps, 1);
    for (Index n = 0; n < x.points(); ++n) {
      const double t = x.times(n);
      const double base = s.u(r, t) - s.v(r, t);
      x.values(n, 0) = s.kind == BoundaryScenario::Kind::NegativeDrift ? base - s.rate(r) * t : base + s.rate(r);
    }
    const Reflection refl = reflect_md(x, Matrix::Constant(1, 1, s.reflection));
    const Matrix& target = s.kind == BoundaryScenario::Kind::NegativeDrift ? refl.z.values : refl.y.values;
    out.sup_norms.push_back(target.cwiseAbs().maxCoeff());
  }
  out.converging = decreasing_toward_zero(out.sup_norms, 1e-12);
  return out;
}

}  // namespace gjn
