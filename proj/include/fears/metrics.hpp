#pragma once

#include "fears/graph.hpp"

#include <cstdint>
#include <vector>

namespace fears {

struct Partition {
  std::vector<int> labels;  // each in [0, k)
  int k = 0;

  Index size() const { return static_cast<Index>(labels.size()); }
  std::vector<Index> cluster_sizes() const;
  Index empty_clusters() const;
};

/// Validates labels and infers k = max label + 1.
Partition make_partition(std::vector<int> labels);

/// (1/k) ||B^T U_k||_F^2: the fraction of span(U_k) captured by B.
double mean_energy(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& reference);

/// Hubert-Arabie adjusted Rand index from the contingency table.
double adjusted_rand(const Partition& a, const Partition& b);

/// Newman modularity sum_c [ w_in(c)/W - (deg(c) / 2W)^2 ], W = total edge weight.
double modularity(const Graph& graph, const Partition& partition);

struct KMeansOptions {
  int max_iter = 300;
  int restarts = 10;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct KMeansResult {
  Partition partition;
  Eigen::MatrixXd centroids;          // k x p
  double wcss = 0.0;
  int iterations = 0;
  int best_restart = 0;
  std::vector<double> wcss_history;   // per Lloyd iteration of the best restart
};

/**
 * Lloyd's algorithm with k-means++ seeding; best of `restarts` by
 * within-cluster sum of squares, lowest restart index winning ties. Restart r
 * uses its own seed derived from (seed, r), so the result does not depend on
 * the thread count.
 */
KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, const KMeansOptions& options = {});

}  // namespace fears
