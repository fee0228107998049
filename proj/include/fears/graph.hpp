#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <optional>
#include <span>
#include <vector>

namespace fears {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Edge {
  Index source = 0;
  Index target = 0;
  double weight = 1.0;
};

/**
 * Undirected weighted graph held as a symmetric CSR adjacency matrix W.
 *
 * Every instance satisfies: W symmetric, zero diagonal, all stored weights
 * finite and strictly positive. Both factories throw std::invalid_argument
 * when handed data that violates this.
 */
class Graph {
 public:
  Graph() = default;

  /// Duplicate pairs (in either orientation) are merged keeping the larger weight.
  static Graph from_edges(Index n_vertices, std::span<const Edge> edges);

  static Graph from_adjacency(SparseMatrix adjacency);

  Index n_vertices() const { return w_.rows(); }
  Index n_edges() const { return w_.nonZeros() / 2; }
  const SparseMatrix& adjacency() const { return w_; }
  Eigen::VectorXd degrees() const;
  double weight(Index i, Index j) const { return w_.coeff(i, j); }
  double total_weight() const;  // sum over undirected edges

  std::vector<Edge> edges() const;  // each undirected edge once, source < target

 private:
  explicit Graph(SparseMatrix w) : w_(std::move(w)) {}
  SparseMatrix w_;
};

/// N points in R^p, one per row.
struct PointCloud {
  Eigen::MatrixXd points;
  std::optional<std::vector<int>> labels;
  // Continuous generating parameter (e.g. swiss-roll angle), for colormaps.
  std::optional<Eigen::VectorXd> parameter;

  Index size() const { return points.rows(); }
  Index dimension() const { return points.cols(); }
};

}  // namespace fears
