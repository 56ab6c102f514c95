#pragma once

#include <cstdint>
#include <vector>

#include "gjn/error.hpp"
#include "gjn/limit_calculus.hpp"
#include "gjn/network.hpp"
#include "gjn/skorokhod.hpp"

namespace gjn {

/// Lower-triangular L with L L' = gamma. Zero pivots (singular PSD input)
/// give zero columns; a pivot below -1e-10 relative to the diagonal scale
/// throws NotPSD.
template <typename Derived>
MatrixX<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& gamma) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  const Index d = gamma.rows();
  if (gamma.cols() != d) throw Error(ErrorKind::NotPSD, "covariance is not square");
  const Scalar scale = std::max<Scalar>(Scalar(1), gamma.diagonal().cwiseAbs().maxCoeff());
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-10) * scale) {
    throw Error(ErrorKind::NotPSD, "covariance is not symmetric");
  }
  MatrixX<Scalar> L = MatrixX<Scalar>::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    Scalar pivot = gamma(k, k) - L.row(k).head(k).squaredNorm();
    if (pivot < Scalar(-1e-10) * scale) {
      throw Error(ErrorKind::NotPSD, "negative pivot at coordinate " + std::to_string(k + 1));
    }
    if (pivot <= Scalar(1e-14) * scale) continue;
    L(k, k) = sqrt(pivot);
    for (Index i = k + 1; i < d; ++i) {
      L(i, k) = (gamma(i, k) - L.row(i).head(k).dot(L.row(k).head(k))) / L(k, k);
    }
  }
  return L;
}

struct SrbmSpec {
  Vector initial;
  Vector drift;
  Matrix covariance;
  Matrix reflection;
  Matrix cholesky_l;

  Index dimension() const { return drift.size(); }
  /// Checks shapes, initial >= 0 and the M-matrix property, and factors gamma.
  static SrbmSpec make(Vector initial, Vector drift, Matrix covariance, Matrix reflection);
};

struct SrbmOptions {
  /// Keep every stride-th grid point (the end point is always kept).
  Index record_stride = 1;
  Index grid_cap = 1'000'000'000;
  ReflectOptions reflect;
};

/// Euler scheme for the driving path X(t_n) = X(0) + theta t_n + L W(t_n) on
/// t_n = n horizon / N with N = round(horizon / step), reflected point by
/// point. The complementarity residual is accumulated over every step, not
/// only the recorded ones.
Reflection simulate_srbm(const SrbmSpec& spec, double horizon, double step, std::uint64_t seed,
                         const SrbmOptions& options = {});

/// The r-th pre-limit SRBM (drift -R delta(r), covariance gamma, reflection R)
/// started at z_tilde0, observed on the clock of block k: returns
/// gamma_k(r) Z(t / gamma_k(r)^2) and gamma_k(r) Y(t / gamma_k(r)^2).
/// Simulated directly on the scaled clock.
Reflection simulate_prelimit_family(const Matrix& reflection, const Matrix& gamma, const ScaleRegime& regime,
                                    double r, const Vector& z_tilde0, Index block, double horizon, double step,
                                    std::uint64_t seed, const SrbmOptions& options = {});
/// Network form: R = I - P' and gamma from the primitives.
PathGrid simulate_prelimit_family(const NetworkSpec& spec, double r, const Vector& z_tilde0, Index block,
                                  double horizon, double step, std::uint64_t seed, const SrbmOptions& options = {});

/// Simulates one limit component started at `initial` (its own dimension)
/// and keeps the reported coordinates.
PathGrid simulate_limit(const LimitDescriptor& desc, Index component, const Vector& initial, double horizon,
                        double step, std::uint64_t seed, const SrbmOptions& options = {});

/// One standard Brownian motion W per call, read at every clock:
/// result[i](n, k) = gamma_k(r_i) W(t_n / gamma_k(r_i)^2). W is generated
/// exactly at the merged sorted set of real times.
std::vector<Matrix> scaled_bm_family(std::uint64_t seed, const std::vector<double>& r_values, const Vector& t_grid,
                                     const ScaleRegime& regime);

}  // namespace gjn
