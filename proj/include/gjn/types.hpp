#pragma once

#include <Eigen/Dense>

namespace gjn {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using IndexVector = Eigen::VectorXi;

/// Stations and blocks are 0-based in code; the JSON schema and all
/// user-facing messages use 1-based indices.
using Index = Eigen::Index;

}  // namespace gjn
