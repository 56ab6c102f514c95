#pragma once

#include <functional>
#include <vector>

#include "gjn/types.hpp"

namespace gjn {

/// Vector-valued path sampled on a strictly increasing grid. Row n of
/// `values` is the path at times(n).
struct PathGrid {
  Vector times;
  Matrix values;

  Index points() const { return times.size(); }
  Index dimension() const { return values.cols(); }

  /// Uniform grid 0, h, ..., steps*h with zero values.
  static PathGrid uniform(double horizon, Index steps, Index dimension);
  /// Coordinates `coords` only.
  PathGrid select(const std::vector<Index>& coords) const;
};

/// Output of the Skorokhod map on a grid: z = x + R y, y nondecreasing from
/// 0, and y_j increasing only where z_j = 0.
struct Reflection {
  PathGrid z;
  PathGrid y;
  /// max_j sum_n z_j(t_n) (y_j(t_n) - y_j(t_{n-1})).
  double complementarity_residual = 0.0;
  int iterations = 0;
};

struct ReflectOptions {
  double tol = 1e-10;
  int max_iterations = 10'000;
};

/// Exact one-dimensional map: y(t_n) = max(0, max_{m <= n} -x(t_m)).
Reflection reflect_1d(const PathGrid& x);

/// Multidimensional map for an M-matrix R by the running-max fixed point
///
///   y_j(t_n) <- max(0, max_{l <= n} (-x_j(t_l) - sum_{k != j} R_jk y_k(t_l)) / R_jj)
///
/// iterated from y = 0 until the sup-norm change is at most tol.
Reflection reflect_md(const PathGrid& x, const Matrix& R, const ReflectOptions& options = {});

/// Largest absolute row sum of R.
template <typename Derived>
typename Derived::Scalar kappa(const Eigen::MatrixBase<Derived>& R) {
  return R.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Causal form of reflect_md: feeds the driving path one grid point at a
/// time and solves the same fixed point at that point. Used by the
/// simulators, which never hold whole unscaled paths in memory.
class ReflectionStepper {
 public:
  explicit ReflectionStepper(const Matrix& R, const ReflectOptions& options = {});

  /// Advances to the next grid point with driving value x; returns z there.
  const Vector& step(const Eigen::Ref<const Vector>& x);

  const Vector& z() const { return z_; }
  /// Regulator in the caller's units (undoing the diagonal normalization).
  Vector y() const { return y_scaled_.cwiseQuotient(diag_); }
  double complementarity_residual() const;
  int max_iterations_used() const { return max_used_; }

 private:
  Matrix off_;     // R D^{-1} - I
  Vector diag_;    // diag(R)
  Vector y_scaled_;
  Vector y_next_;
  Vector z_;
  Vector residual_;
  ReflectOptions options_;
  bool started_ = false;
  int max_used_ = 0;
};

/// Deterministic path families that test the boundary behaviour of the maps.
///
/// NegativeDrift: z^(r) = Phi(u^(r) - v^(r) - m(r) t), which vanishes as m -> inf.
/// PositiveOffset: y^(r) = Psi(u^(r) - v^(r) + a(r); c), which vanishes as a -> inf.
struct BoundaryScenario {
  enum class Kind { NegativeDrift, PositiveOffset };
  Kind kind = Kind::NegativeDrift;
  std::function<double(double r, double t)> u = [](double, double) { return 0.0; };
  std::function<double(double r, double t)> v = [](double, double) { return 0.0; };
  std::function<double(double r)> rate = [](double r) { return 1.0 / r; };
  double reflection = 1.0;
  double horizon = 1.0;
  Index steps = 1000;
  std::vector<double> r_values{0.3, 0.1, 0.03, 0.01};
};

struct BoundaryCheck {
  std::vector<double> sup_norms;
  bool converging = false;
};

BoundaryCheck check_boundary_paths(const BoundaryScenario& scenario);

}  // namespace gjn
