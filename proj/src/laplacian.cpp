#include "fears/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace fears {

LaplacianVariant parse_laplacian_variant(std::string_view name) {
  if (name == "combinatorial") return LaplacianVariant::combinatorial;
  if (name == "normalized") return LaplacianVariant::normalized;
  throw std::invalid_argument("unknown laplacian variant: " + std::string(name));
}

std::string_view to_string(LaplacianVariant variant) {
  return variant == LaplacianVariant::normalized ? "normalized" : "combinatorial";
}

LaplacianOperator laplacian(const Graph& graph, LaplacianVariant variant) {
  const Index n = graph.n_vertices();
  const SparseMatrix& w = graph.adjacency();

  LaplacianOperator op;
  op.variant = variant;
  op.degrees = graph.degrees();

  Eigen::VectorXd inv_sqrt_deg;
  if (variant == LaplacianVariant::normalized) {
    inv_sqrt_deg.resize(n);
    for (Index i = 0; i < n; ++i) {
      if (op.degrees[i] <= 0.0)
        throw std::invalid_argument("normalized Laplacian undefined: vertex " + std::to_string(i) +
                                    " is isolated (zero degree)");
      inv_sqrt_deg[i] = 1.0 / std::sqrt(op.degrees[i]);
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(w.nonZeros() + n));
  for (Index i = 0; i < n; ++i) {
    if (variant == LaplacianVariant::combinatorial)
      triplets.emplace_back(i, i, op.degrees[i]);
    else
      triplets.emplace_back(i, i, 1.0);
    for (SparseMatrix::InnerIterator it(w, i); it; ++it) {
      double v = -it.value();
      if (variant == LaplacianVariant::normalized) v *= inv_sqrt_deg[i] * inv_sqrt_deg[it.col()];
      triplets.emplace_back(i, it.col(), v);
    }
  }
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();

  op.lambda_max_bound = estimate_lambda_max(op);
  return op;
}

double estimate_lambda_max(const LaplacianOperator& L, double tol, int max_iter) {
  if (L.variant == LaplacianVariant::normalized) return 2.0;

  const Index n = L.size();
  const double gershgorin = 2.0 * (L.degrees.size() ? L.degrees.maxCoeff() : 0.0);
  if (gershgorin == 0.0) return 0.0;  // edgeless graph: L == 0

  // Fixed start vector keeps the bound deterministic.
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x[i] = normal(rng);
  x.normalize();

  constexpr int kMinIterations = 50;
  double rayleigh = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd y = L.matrix * x;
    const double next = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) return gershgorin;
    x = y / norm;
    if (iter >= kMinIterations && std::abs(next - rayleigh) <= tol * std::abs(next))
      return std::min(kLambdaMaxSafety * next, gershgorin);
    rayleigh = next;
  }
  return gershgorin;
}

}  // namespace fears
