#include "fears/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace fears {

std::vector<Index> Partition::cluster_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

Index Partition::empty_clusters() const {
  const auto sizes = cluster_sizes();
  return static_cast<Index>(std::count(sizes.begin(), sizes.end(), Index{0}));
}

Partition make_partition(std::vector<int> labels) {
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("partition labels must be non-negative");
    k = std::max(k, l + 1);
  }
  return Partition{std::move(labels), k};
}

double mean_energy(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& reference) {
  if (basis.rows() != reference.rows() || basis.cols() != reference.cols())
    throw std::invalid_argument("mean_energy: shape mismatch (" + std::to_string(basis.rows()) + "x" +
                                std::to_string(basis.cols()) + " vs " + std::to_string(reference.rows()) + "x" +
                                std::to_string(reference.cols()) + ")");
  if (basis.cols() == 0) throw std::invalid_argument("mean_energy: empty basis");
  return (basis.transpose() * reference).squaredNorm() / static_cast<double>(reference.cols());
}

namespace {
double choose2(double x) { return 0.5 * x * (x - 1.0); }
}  // namespace

double adjusted_rand(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand: partitions differ in size");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;

  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    table[{a.labels[i], b.labels[i]}] += 1.0;
    rows[a.labels[i]] += 1.0;
    cols[b.labels[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : table) index += choose2(count);
  for (const auto& [key, count] : rows) sum_rows += choose2(count);
  for (const auto& [key, count] : cols) sum_cols += choose2(count);

  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial in the same way (all singletons or one block).
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double modularity(const Graph& graph, const Partition& partition) {
  if (partition.size() != graph.n_vertices())
    throw std::invalid_argument("modularity: partition does not cover the graph");
  const double total = graph.total_weight();
  if (!(total > 0.0)) throw std::invalid_argument("modularity undefined on a graph without edges");

  std::vector<double> intra(static_cast<std::size_t>(partition.k), 0.0);
  std::vector<double> degree(static_cast<std::size_t>(partition.k), 0.0);
  const SparseMatrix& w = graph.adjacency();
  for (Index i = 0; i < w.outerSize(); ++i) {
    const int ci = partition.labels[static_cast<std::size_t>(i)];
    for (SparseMatrix::InnerIterator it(w, i); it; ++it) {
      degree[static_cast<std::size_t>(ci)] += it.value();
      if (partition.labels[static_cast<std::size_t>(it.col())] == ci)
        intra[static_cast<std::size_t>(ci)] += 0.5 * it.value();  // each edge seen twice
    }
  }
  double q = 0.0;
  for (int c = 0; c < partition.k; ++c) {
    const double frac = degree[static_cast<std::size_t>(c)] / (2.0 * total);
    q += intra[static_cast<std::size_t>(c)] / total - frac * frac;
  }
  return q;
}

}  // namespace fears
