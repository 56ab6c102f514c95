#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gjn/error.hpp"
#include "gjn/network.hpp"
#include "gjn/types.hpp"

namespace gjn {

namespace detail {

template <typename Scalar>
Eigen::PartialPivLU<MatrixX<Scalar>> checked_lu(const MatrixX<Scalar>& A, const char* what) {
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(A);
  using std::abs;
  if (A.size() > 0 && !(abs(lu.rcond()) > Scalar(1e-14))) {
    throw Error(ErrorKind::SingularBlock, what);
  }
  return lu;
}

}  // namespace detail

/// Absorption-probability matrix of the routing chain. Entry (i, j) is the
/// probability that the chain started at i visits j (in one or more steps)
/// before exiting or entering any station with index above j. Column j is
///
///   w[0:j, j] = (I - P[0:j, 0:j])^{-1} P[0:j, j]
///   w[j:, j]  = P[j:, j] + P[j:, 0:j] w[0:j, j]
///
/// with the j = 0 column equal to P[:, 0].
template <typename Derived>
MatrixX<typename Derived::Scalar> w_matrix(const Eigen::MatrixBase<Derived>& routing) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> P = routing;
  const Index J = P.rows();
  MatrixX<Scalar> w(J, J);
  for (Index j = 0; j < J; ++j) {
    if (j == 0) {
      w.col(0) = P.col(0);
      continue;
    }
    const MatrixX<Scalar> A = MatrixX<Scalar>::Identity(j, j) - P.topLeftCorner(j, j);
    const VectorX<Scalar> head = detail::checked_lu(A, "I - P_{j-1} is singular").solve(P.col(j).head(j));
    w.col(j).head(j) = head;
    w.col(j).tail(J - j) = P.col(j).tail(J - j) + P.bottomLeftCorner(J - j, j) * head;
  }
  return w;
}

/// The i <= j entries of the w-matrix computed from a reflection matrix:
///
///   w[0:j, j] = -(R[j, 0:j] R[0:j, 0:j]^{-1})'
///   w[j, j]   = 1 - R[j, j] + R[j, 0:j] R[0:j, 0:j]^{-1} R[0:j, j]
///
/// Entries below the diagonal are left at zero.
template <typename Derived>
MatrixX<typename Derived::Scalar> w_from_R(const Eigen::MatrixBase<Derived>& reflection) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> R = reflection;
  const Index J = R.rows();
  MatrixX<Scalar> w = MatrixX<Scalar>::Zero(J, J);
  for (Index j = 0; j < J; ++j) {
    if (j == 0) {
      w(0, 0) = Scalar(1) - R(0, 0);
      continue;
    }
    const MatrixX<Scalar> A = R.topLeftCorner(j, j);
    // row = R[j, 0:j] A^{-1}  <=>  A' row' = R[j, 0:j]'
    const VectorX<Scalar> row = detail::checked_lu(MatrixX<Scalar>(A.transpose()), "leading block of R is singular")
                                    .solve(R.row(j).head(j).transpose());
    w.col(j).head(j) = -row;
    w(j, j) = Scalar(1) - R(j, j) + row.dot(R.col(j).head(j));
  }
  return w;
}

/// Block Gaussian elimination of R at a pivot.
template <typename Scalar>
struct Elimination {
  Index pivot = 0;
  MatrixX<Scalar> E;  // elementary row-operation matrix
  MatrixX<Scalar> G;  // E R, with the block below the leading pivot block exactly zero
};

/// Pivot k is 0-based: k = 0 gives E = I and G = R. For k >= 1, with
/// A = R[0:k, 0:k], B = R[0:k, k:], C = R[k:, 0:k], D = R[k:, k:],
///
///   E = [[I, 0], [-C A^{-1}, I]],   G = [[A, B], [0, D - C A^{-1} B]].
template <typename Derived>
Elimination<typename Derived::Scalar> eliminate(const Eigen::MatrixBase<Derived>& reflection, Index k) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> R = reflection;
  const Index J = R.rows();
  if (k < 0 || k >= J) throw Error(ErrorKind::InvalidArgument, "pivot index out of range");
  Elimination<Scalar> out{k, MatrixX<Scalar>::Identity(J, J), R};
  if (k == 0) return out;

  const Index m = J - k;
  const MatrixX<Scalar> A = R.topLeftCorner(k, k);
  // X = C A^{-1}  <=>  A' X' = C'
  const MatrixX<Scalar> X = detail::checked_lu(MatrixX<Scalar>(A.transpose()), "leading block of R is singular")
                                .solve(R.bottomLeftCorner(m, k).transpose())
                                .transpose();
  out.E.bottomLeftCorner(m, k) = -X;
  out.G.bottomLeftCorner(m, k).setZero();
  out.G.bottomRightCorner(m, m) = R.bottomRightCorner(m, m) - X * R.topRightCorner(k, m);
  return out;
}

/// Sign pattern plus nonnegative inverse, each to within tol.
template <typename Derived>
bool is_m_matrix(const Eigen::MatrixBase<Derived>& matrix, double tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> M = matrix;
  const Index n = M.rows();
  if (n != M.cols()) return false;
  for (Index i = 0; i < n; ++i) {
    if (!(M(i, i) > Scalar(0))) return false;
    for (Index j = 0; j < n; ++j) {
      if (i != j && M(i, j) > Scalar(tol)) return false;
    }
  }
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(M);
  using std::abs;
  if (!(abs(lu.rcond()) > Scalar(1e-14))) return false;
  return (lu.inverse().array() >= Scalar(-tol)).all();
}

/// Covariance of the driving Brownian motion:
///
///   Gamma = diag(alpha c_e^2) + sum_i lambda_i [diag(P_i) - P_i P_i' + c_{s,i}^2 (e_i - P_i)(e_i - P_i)']
///
/// where P_i is row i of P as a column vector.
template <typename Scalar>
MatrixX<Scalar> covariance_gamma(const MatrixX<Scalar>& P, const VectorX<Scalar>& alpha,
                                 const VectorX<Scalar>& lambda, const VectorX<Scalar>& arrival_scv,
                                 const VectorX<Scalar>& service_scv) {
  const Index J = P.rows();
  MatrixX<Scalar> gamma = alpha.cwiseProduct(arrival_scv).asDiagonal();
  for (Index i = 0; i < J; ++i) {
    const VectorX<Scalar> p = P.row(i).transpose();
    VectorX<Scalar> e_minus_p = -p;
    e_minus_p(i) += Scalar(1);
    gamma.diagonal() += lambda(i) * p;
    gamma.noalias() -= lambda(i) * p * p.transpose();
    gamma.noalias() += lambda(i) * service_scv(i) * e_minus_p * e_minus_p.transpose();
  }
  return gamma;
}

/// u = (w[0:j, j], 1, 0, ..., 0).
template <typename Scalar>
VectorX<Scalar> u_vector(const MatrixX<Scalar>& w, Index j) {
  VectorX<Scalar> u = VectorX<Scalar>::Zero(w.rows());
  u.head(j) = w.col(j).head(j);
  u(j) = Scalar(1);
  return u;
}

/// Limit variance u' Gamma u of station j.
template <typename Scalar>
Scalar sigma_uGu(const MatrixX<Scalar>& w, const MatrixX<Scalar>& gamma, Index j) {
  const VectorX<Scalar> u = u_vector(w, j);
  return u.dot(gamma * u);
}

/// Limit variance of station j written as the three-part sum over upstream
/// stations (external arrivals), the station itself, and downstream stations.
template <typename Scalar>
Scalar sigma_primitives(const MatrixX<Scalar>& w, const VectorX<Scalar>& alpha, const VectorX<Scalar>& lambda,
                        const VectorX<Scalar>& arrival_scv, const VectorX<Scalar>& service_scv, Index j) {
  const Index J = w.rows();
  Scalar sum(0);
  for (Index i = 0; i < j; ++i) {
    const Scalar wij = w(i, j);
    sum += alpha(i) * (wij * wij * arrival_scv(i) + wij * (Scalar(1) - wij));
  }
  sum += alpha(j) * arrival_scv(j);
  for (Index i = j + 1; i < J; ++i) {
    const Scalar wij = w(i, j);
    sum += lambda(i) * (wij * wij * service_scv(i) + wij * (Scalar(1) - wij));
  }
  const Scalar wjj = w(j, j);
  sum += lambda(j) * (service_scv(j) * (Scalar(1) - wjj) * (Scalar(1) - wjj) + wjj * (Scalar(1) - wjj));
  return sum;
}

/// R = I - P'.
template <typename Derived>
MatrixX<typename Derived::Scalar> reflection_matrix(const Eigen::MatrixBase<Derived>& routing) {
  using Scalar = typename Derived::Scalar;
  return MatrixX<Scalar>::Identity(routing.rows(), routing.cols()) - routing.transpose();
}

// ---------------------------------------------------------------------------
// Network-level entry points and limit descriptors.

Matrix covariance_gamma(const NetworkSpec& spec);
double sigma_primitives(const NetworkSpec& spec, Index j);
double sigma_uGu(const NetworkSpec& spec, Index j);

enum class Regime { Matching, Lowest, BlockMatching, BlockLowest };

std::string_view to_string(Regime regime);
Regime regime_from_string(std::string_view name);

/// Parameters of one SRBM in a limit process.
struct SrbmComponent {
  /// Symbolic initial law, e.g. "xi[2]", "xi[1:3]" or "0".
  std::string initial_label;
  /// Station index feeding each SRBM coordinate's initial value, or empty when
  /// the component starts at 0.
  std::vector<Index> initial_stations;
  Vector drift;
  Matrix covariance;
  Matrix reflection;
  /// Component coordinates that appear in the limit process, and the network
  /// station each one describes.
  std::vector<Index> reported;
  std::vector<Index> stations;

  Index dimension() const { return drift.size(); }
  /// Initial SRBM state given a concrete xi over all stations.
  Vector initial_state(const Vector& xi) const;
};

struct LimitDescriptor {
  Regime regime = Regime::Matching;
  std::vector<SrbmComponent> components;
};

/// Limit descriptor from the SRBM-level data (R, Gamma, scale regime).
LimitDescriptor limit_descriptor(const Matrix& reflection, const Matrix& gamma, const ScaleRegime& scales,
                                 Regime regime);
/// Limit descriptor of a network: R = I - P' and Gamma from the primitives.
LimitDescriptor limit_descriptor(const NetworkSpec& spec, Regime regime);

}  // namespace gjn
