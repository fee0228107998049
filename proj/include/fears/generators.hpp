#pragma once

#include "fears/graph.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace fears {

enum class KernelType { binary, gaussian };

KernelType parse_kernel(std::string_view name);

/**
 * Symmetrized exact k-nearest-neighbour graph.
 *
 * Each point selects its k_nn nearest others (Euclidean, ties broken by lower
 * index); an edge is kept when either endpoint selects the other. Gaussian
 * weights are exp(-dist^2 / sigma^2); sigma defaults to the mean distance to
 * the k_nn-th neighbour. Weights are capped at 1, so duplicate points give
 * weight 1 rather than an invalid zero-distance edge.
 */
Graph build_knn_graph(const PointCloud& cloud, Index k_nn, KernelType kernel = KernelType::binary,
                      std::optional<double> sigma = std::nullopt);

struct SbmGraph {
  Graph graph;
  std::vector<int> labels;
  double p_in = 0.0;
  double p_out = 0.0;
};

/// Stochastic block model with uniformly drawn classes. p_in solves
/// s = (N/k - 1) p_in + (N - N/k) p_out with p_out = eps * p_in.
SbmGraph generate_sbm(Index n, int k, double eps, double avg_degree, std::uint64_t seed);

/// theta ~ U[a*pi, b*pi], x = theta cos theta, y ~ U[0, 1], z = theta sin theta.
/// theta is kept in PointCloud::parameter.
PointCloud generate_swissroll(Index n, double a, double b, std::uint64_t seed);

/// Uniform random points in the unit square (sensor-network layout).
PointCloud generate_sensor_points(Index n, std::uint64_t seed);

Graph sensor_graph(Index n, Index k_nn, std::uint64_t seed, KernelType kernel = KernelType::binary);

Graph cycle_graph(Index n);
Graph path_graph(Index n);
Graph complete_graph(Index n);

}  // namespace fears
