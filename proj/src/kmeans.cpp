#include "fears/metrics.hpp"
#include "fears/random.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace fears {

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double wcss = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> history;
};

Eigen::MatrixXd plus_plus_seeding(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const Index n = x.rows();
  Eigen::MatrixXd centroids(k, x.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  centroids.row(0) = x.row(first(rng));
  Eigen::VectorXd d2 = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);  // every point already coincides with a centre
    }
    centroids.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

// Nearest centroid per row, lowest index on ties; returns the WCSS.
double assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids, std::vector<int>& labels) {
  const Eigen::VectorXd c2 = centroids.rowwise().squaredNorm();
  const Eigen::MatrixXd cross = x * centroids.transpose();
  double wcss = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centroids.rows(); ++c) {
      const double dist = c2[c] - 2.0 * cross(i, c);
      if (dist < best_d) {
        best_d = dist;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  for (Index i = 0; i < x.rows(); ++i)
    wcss += (x.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return wcss;
}

double update(const Eigen::MatrixXd& x, const std::vector<int>& labels, Eigen::MatrixXd& centroids) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centroids.rows(), centroids.cols());
  std::vector<Index> counts(static_cast<std::size_t>(centroids.rows()), 0);
  for (Index i = 0; i < x.rows(); ++i) {
    sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (Index c = 0; c < centroids.rows(); ++c)
    if (counts[static_cast<std::size_t>(c)] > 0)
      centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  double wcss = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    wcss += (x.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return wcss;
}

Run lloyd(const Eigen::MatrixXd& x, int k, int max_iter, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Run run;
  run.centroids = plus_plus_seeding(x, k, rng);
  run.labels.assign(static_cast<std::size_t>(x.rows()), -1);
  std::vector<int> next(run.labels.size());
  for (int iter = 0; iter < max_iter; ++iter) {
    assign(x, run.centroids, next);
    const bool changed = next != run.labels;
    run.labels.swap(next);
    run.wcss = update(x, run.labels, run.centroids);
    run.history.push_back(run.wcss);
    run.iterations = iter + 1;
    if (!changed) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, const KMeansOptions& options) {
  const Index n = rows.rows();
  if (n < 1) throw std::invalid_argument("kmeans needs at least one row");
  if (k < 1 || k > n) throw std::invalid_argument("kmeans needs 1 <= k <= N");
  if (options.restarts < 1 || options.max_iter < 1) throw std::invalid_argument("kmeans needs restarts, max_iter >= 1");
  if (!rows.allFinite()) throw std::invalid_argument("kmeans input has non-finite values");

  std::vector<Run> runs(static_cast<std::size_t>(options.restarts));
  auto work = [&](int r) { runs[static_cast<std::size_t>(r)] = lloyd(rows, k, options.max_iter, derive_seed(options.seed, r)); };
  const int workers = std::clamp(options.threads, 1, options.restarts);
  if (workers == 1) {
    for (int r = 0; r < options.restarts; ++r) work(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int r = w; r < options.restarts; r += workers) work(r);
      });
    for (auto& t : pool) t.join();
  }

  int best = 0;
  for (int r = 1; r < options.restarts; ++r)
    if (runs[static_cast<std::size_t>(r)].wcss < runs[static_cast<std::size_t>(best)].wcss) best = r;

  Run& winner = runs[static_cast<std::size_t>(best)];
  KMeansResult result;
  result.partition = Partition{std::move(winner.labels), k};
  result.centroids = std::move(winner.centroids);
  result.wcss = winner.wcss;
  result.iterations = winner.iterations;
  result.best_restart = best;
  result.wcss_history = std::move(winner.history);
  return result;
}

}  // namespace fears
