#pragma once

#include "fears/generators.hpp"
#include "fears/laplacian.hpp"
#include "fears/oracle.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <random>

namespace fears::testing {

inline Eigen::MatrixXd random_gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Haar-ish random matrix with orthonormal columns.
inline Eigen::MatrixXd random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_gaussian(rows, cols, seed));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

/// Largest principal angle (radians) between the column spans of two
/// orthonormal blocks of equal width.
inline double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  const double s = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
  return std::acos(s);
}

inline Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  return svd.matrixU();
}

/// Diagonal "graph" operator with a prescribed spectrum, for scalar checks.
inline LaplacianOperator diagonal_operator(const Eigen::VectorXd& values, double lambda_max) {
  LaplacianOperator op;
  op.matrix.resize(values.size(), values.size());
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < values.size(); ++i) t.emplace_back(i, i, values[i]);
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.lambda_max_bound = lambda_max;
  op.degrees = Eigen::VectorXd::Ones(values.size());
  return op;
}

inline bool has_gap(const Eigen::VectorXd& eigs, Index k, double rel = 1e-6) {
  return k >= eigs.size() || eigs[k] - eigs[k - 1] > rel * std::max(1.0, eigs[eigs.size() - 1]);
}

}  // namespace fears::testing
