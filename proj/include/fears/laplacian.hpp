#pragma once

#include "fears/graph.hpp"

#include <string_view>

namespace fears {

enum class LaplacianVariant { combinatorial, normalized };

LaplacianVariant parse_laplacian_variant(std::string_view name);
std::string_view to_string(LaplacianVariant variant);

/// Sparse symmetric PSD Laplacian plus a certified upper bound on its spectrum.
struct LaplacianOperator {
  LaplacianVariant variant = LaplacianVariant::combinatorial;
  SparseMatrix matrix;
  double lambda_max_bound = 0.0;
  Eigen::VectorXd degrees;

  Index size() const { return matrix.rows(); }
};

/// L = D - W, or I - D^{-1/2} W D^{-1/2}. The normalized variant rejects
/// isolated vertices and carries the bound 2; the combinatorial variant is
/// bounded through estimate_lambda_max.
LaplacianOperator laplacian(const Graph& graph, LaplacianVariant variant);

/// Upper bound on the largest eigenvalue of L.
///
/// Normalized: exactly 2. Combinatorial: power-iteration Rayleigh quotient
/// times 1.01, never above the Gershgorin bound 2 * max degree. If the power
/// iteration has not settled within max_iter steps the Gershgorin bound is
/// returned instead.
double estimate_lambda_max(const LaplacianOperator& L, double tol = 1e-8, int max_iter = 2000);

inline constexpr double kLambdaMaxSafety = 1.01;

}  // namespace fears
