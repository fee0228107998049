#include "fears/graph.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace fears {

Graph Graph::from_edges(Index n_vertices, std::span<const Edge> edges) {
  if (n_vertices < 1) throw std::invalid_argument("graph needs at least one vertex");

  std::map<std::pair<Index, Index>, double> merged;
  for (const Edge& e : edges) {
    if (e.source < 0 || e.target < 0 || e.source >= n_vertices || e.target >= n_vertices)
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.source) +
                                  " " + std::to_string(e.target));
    if (e.source == e.target)
      throw std::invalid_argument("self-loop on vertex " + std::to_string(e.source));
    if (!std::isfinite(e.weight) || e.weight <= 0.0)
      throw std::invalid_argument("edge weights must be finite and strictly positive");
    auto key = std::minmax(e.source, e.target);
    auto [it, inserted] = merged.emplace(key, e.weight);
    if (!inserted) it->second = std::max(it->second, e.weight);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * merged.size());
  for (const auto& [key, w] : merged) {
    triplets.emplace_back(key.first, key.second, w);
    triplets.emplace_back(key.second, key.first, w);
  }
  SparseMatrix w(n_vertices, n_vertices);
  w.setFromTriplets(triplets.begin(), triplets.end());
  w.makeCompressed();
  return Graph(std::move(w));
}

Graph Graph::from_adjacency(SparseMatrix adjacency) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() < 1)
    throw std::invalid_argument("adjacency must be square and non-empty");
  adjacency.prune(0.0);
  adjacency.makeCompressed();
  for (Index i = 0; i < adjacency.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it) {
      if (it.col() == i) throw std::invalid_argument("adjacency has a non-zero diagonal");
      if (!std::isfinite(it.value()) || it.value() <= 0.0)
        throw std::invalid_argument("adjacency weights must be finite and strictly positive");
      if (adjacency.coeff(it.col(), i) != it.value())
        throw std::invalid_argument("adjacency is not symmetric");
    }
  }
  return Graph(std::move(adjacency));
}

Eigen::VectorXd Graph::degrees() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(w_.rows());
  for (Index i = 0; i < w_.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(w_, i); it; ++it) d[i] += it.value();
  return d;
}

double Graph::total_weight() const { return 0.5 * degrees().sum(); }

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(n_edges()));
  for (Index i = 0; i < w_.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(w_, i); it; ++it)
      if (it.col() > i) out.push_back({i, it.col(), it.value()});
  return out;
}

}  // namespace fears
