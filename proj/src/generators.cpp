#include "fears/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace fears {

KernelType parse_kernel(std::string_view name) {
  if (name == "binary") return KernelType::binary;
  if (name == "gaussian") return KernelType::gaussian;
  throw std::invalid_argument("unknown kernel: " + std::string(name));
}

Graph build_knn_graph(const PointCloud& cloud, Index k_nn, KernelType kernel,
                      std::optional<double> sigma) {
  const Index n = cloud.size();
  if (k_nn < 1) throw std::invalid_argument("k_nn must be at least 1");
  if (k_nn >= n) throw std::invalid_argument("k_nn must be smaller than the number of points");
  if (!cloud.points.allFinite()) throw std::invalid_argument("point cloud has non-finite coordinates");
  if (sigma && !(*sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

  // neighbours[i] holds (squared distance, j) for the k_nn nearest j != i.
  std::vector<std::vector<std::pair<double, Index>>> neighbours(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Index>> row(static_cast<std::size_t>(n - 1));
  const Eigen::MatrixXd pts_t = cloud.points.transpose();  // column per point
  for (Index i = 0; i < n; ++i) {
    std::size_t pos = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      row[pos++] = {(pts_t.col(i) - pts_t.col(j)).squaredNorm(), j};
    }
    auto kth = row.begin() + (k_nn - 1);
    std::nth_element(row.begin(), kth, row.end());
    std::sort(row.begin(), kth + 1);
    neighbours[static_cast<std::size_t>(i)].assign(row.begin(), kth + 1);
  }

  double sig = 1.0;
  if (kernel == KernelType::gaussian) {
    if (sigma) {
      sig = *sigma;
    } else {
      double acc = 0.0;
      for (const auto& nb : neighbours) acc += std::sqrt(nb.back().first);
      sig = acc / static_cast<double>(n);
      if (!(sig > 0.0)) sig = 1.0;  // all points coincide
    }
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n * k_nn));
  for (Index i = 0; i < n; ++i) {
    for (const auto& [d2, j] : neighbours[static_cast<std::size_t>(i)]) {
      double w = 1.0;
      if (kernel == KernelType::gaussian) w = std::min(1.0, std::exp(-d2 / (sig * sig)));
      // Far-away neighbours can underflow; keep the edge alive.
      w = std::max(w, std::numeric_limits<double>::min());
      edges.push_back({i, j, w});
    }
  }
  return Graph::from_edges(n, edges);
}

SbmGraph generate_sbm(Index n, int k, double eps, double avg_degree, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("SBM needs at least two vertices");
  if (k < 1 || k > n) throw std::invalid_argument("SBM class count must be in [1, N]");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("SBM eps must lie in [0, 1]");
  if (!(avg_degree > 0.0)) throw std::invalid_argument("SBM average degree must be positive");

  const double nd = static_cast<double>(n);
  const double block = nd / k;
  const double denom = (block - 1.0) + eps * (nd - block);
  if (!(denom > 0.0)) throw std::invalid_argument("SBM parameters leave no possible edges");
  const double p = avg_degree / denom;
  if (p > 1.0)
    throw std::invalid_argument("SBM parameters force intra-class probability p = " +
                                std::to_string(p) + " > 1");

  SbmGraph out;
  out.p_in = p;
  out.p_out = eps * p;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_class(0, k - 1);
  out.labels.resize(static_cast<std::size_t>(n));
  for (auto& label : out.labels) label = pick_class(rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(avg_degree * nd * 0.6));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double prob = out.labels[i] == out.labels[j] ? out.p_in : out.p_out;
      if (unit(rng) < prob) edges.push_back({i, j, 1.0});
    }
  }
  out.graph = Graph::from_edges(n, edges);
  return out;
}

PointCloud generate_swissroll(Index n, double a, double b, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("swissroll needs at least one point");
  if (!(a < b)) throw std::invalid_argument("swissroll requires a < b");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(a * std::numbers::pi, b * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PointCloud cloud;
  cloud.points.resize(n, 3);
  Eigen::VectorXd theta(n);
  for (Index i = 0; i < n; ++i) {
    const double t = angle(rng);
    theta[i] = t;
    cloud.points(i, 0) = t * std::cos(t);
    cloud.points(i, 1) = unit(rng);
    cloud.points(i, 2) = t * std::sin(t);
  }
  cloud.parameter = std::move(theta);
  return cloud;
}

PointCloud generate_sensor_points(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sensor layout needs at least one point");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud cloud;
  cloud.points.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    cloud.points(i, 0) = unit(rng);
    cloud.points(i, 1) = unit(rng);
  }
  return cloud;
}

Graph sensor_graph(Index n, Index k_nn, std::uint64_t seed, KernelType kernel) {
  return build_knn_graph(generate_sensor_points(n, seed), k_nn, kernel);
}

Graph cycle_graph(Index n) {
  if (n < 3) throw std::invalid_argument("cycle needs at least three vertices");
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return Graph::from_edges(n, edges);
}

Graph path_graph(Index n) {
  if (n < 2) throw std::invalid_argument("path needs at least two vertices");
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph::from_edges(n, edges);
}

Graph complete_graph(Index n) {
  if (n < 2) throw std::invalid_argument("complete graph needs at least two vertices");
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return Graph::from_edges(n, edges);
}

}  // namespace fears
