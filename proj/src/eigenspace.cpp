#include "fears/eigenspace.hpp"

#include "fears/random.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace fears {

Orthonormalization parse_orthonormalization(std::string_view name) {
  if (name == "svd") return Orthonormalization::svd;
  if (name == "qr") return Orthonormalization::qr;
  throw std::invalid_argument("unknown orthonormalization: " + std::string(name));
}

std::uint64_t signal_seed_for(std::uint64_t master_seed) { return derive_seed(master_seed, 0x51ULL); }
std::uint64_t probe_seed_for(std::uint64_t master_seed) { return derive_seed(master_seed, 0x9bULL); }

EigenspaceApprox orthonormalize_sketch(const SignalMatrix& sketch, Index k, Orthonormalization method,
                                       OpCounter* counter) {
  const Index n = sketch.rows(), d = sketch.cols();
  if (k < 1 || k > d || d > n) throw std::invalid_argument("orthonormalize_sketch needs 1 <= k <= d <= N");

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(sketch);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, method == Orthonormalization::svd ? Eigen::ComputeFullU : 0);
  const Eigen::VectorXd& s = svd.singularValues();
  if (counter) {
    counter->qr_calls += 1;
    counter->qr_cost += static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(d * d);
    counter->svd_calls += 1;
    counter->svd_core_cost += static_cast<std::uint64_t>(d * d * d);
  }
  if (!(s[0] > 0.0) || s[k - 1] < 1e-13 * s[0])
    throw RankDeficientSketch("filtered sketch has numerical rank below k = " + std::to_string(k) +
                              " (a probability-zero event for Gaussian signals under an exact filter; "
                              "check the cutoff and the filter order)");

  EigenspaceApprox out;
  out.singular_values = s.head(k);
  if (method == Orthonormalization::svd)
    out.basis = q * svd.matrixU().leftCols(k);
  else
    out.basis = q.leftCols(k);
  return out;
}

EigenspaceApprox approximate_eigenspace(const LowpassFilter& filter, Index k, const EigenspaceOptions& options,
                                        OpCounter* filter_counter) {
  const Index n = filter.size();
  const Index d = options.d > 0 ? options.d : k;
  if (k < 1 || k > n) throw std::invalid_argument("approximate_eigenspace needs 1 <= k <= N");
  if (d < k || d > n) throw std::invalid_argument("approximate_eigenspace needs k <= d <= N");

  EigenspaceDiagnostics diag;
  diag.m = options.m;
  diag.d = d;
  diag.master_seed = options.seed;
  diag.signal_seed = signal_seed_for(options.seed);
  diag.probe_seed = probe_seed_for(options.seed);

  const SignalMatrix signals = gaussian_signals(n, d, diag.signal_seed);

  const std::uint64_t spmv_start = filter_counter ? filter_counter->spmv : 0;
  double cutoff = 0.0;
  if (options.lambda_k) {
    cutoff = *options.lambda_k;
    if (!(cutoff >= 0.0)) throw std::invalid_argument("fixed lambda_k must be non-negative");
  } else {
    LambdaEstimate est;
    if (options.search == LambdaSearch::fast) {
      est = estimate_lambda_k_fast(filter, k, {.d = k, .max_iter = options.max_iter, .seed = diag.probe_seed});
    } else {
      est = estimate_lambda_k_dichotomy(filter, k, {.d = k, .tol_eps = options.tol_eps, .seed = diag.probe_seed});
    }
    cutoff = est.lambda_est;
    diag.lambda_estimated = true;
    diag.lambda_iterations = est.iterations;
    diag.lambda_converged = est.converged;
    diag.lambda_history = std::move(est.history);
  }
  const std::uint64_t spmv_probes = filter_counter ? filter_counter->spmv : 0;

  const SignalMatrix sketch = filter.apply(cutoff, signals);
  const std::uint64_t spmv_end = filter_counter ? filter_counter->spmv : 0;

  OpCounter dense_ops;
  EigenspaceApprox out = orthonormalize_sketch(sketch, k, options.orthonormalization, &dense_ops);
  out.lambda_k_used = cutoff;
  diag.probe_spmv = spmv_probes - spmv_start;
  diag.filter_spmv = spmv_end - spmv_probes;
  if (filter_counter) {
    *filter_counter += dense_ops;
    diag.ops = *filter_counter;
  } else {
    diag.ops = dense_ops;
  }
  out.diagnostics = std::move(diag);
  return out;
}

EigenspaceApprox approximate_eigenspace(const LaplacianOperator& L, Index k, const EigenspaceOptions& options) {
  OpCounter counter;
  const ChebyshevLowpass filter(L, options.m, options.damping, &counter, options.threads);
  return approximate_eigenspace(filter, k, options, &counter);
}

SignalMatrix raw_sketch(const LowpassFilter& filter, Index d, double lambda_k, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("raw_sketch needs d >= 1");
  return filter.apply(lambda_k, gaussian_signals(filter.size(), d, signal_seed_for(seed)));
}

SignalMatrix raw_sketch(const LaplacianOperator& L, Index k, Index d, double lambda_k, int m, std::uint64_t seed,
                        OpCounter* counter) {
  if (k < 1 || d < k) throw std::invalid_argument("raw_sketch needs 1 <= k <= d");
  const ChebyshevLowpass filter(L, m, Damping::jackson, counter);
  return raw_sketch(filter, d, lambda_k, seed);
}

ProjectionStatsReport gaussian_projection_stats(const Eigen::MatrixXd& u, Index d, Index trials,
                                                std::uint64_t seed) {
  const Index n = u.rows(), c = u.cols();
  if (c < 2 || d < 2) throw std::invalid_argument("projection stats need at least 2 basis vectors and 2 signals");
  if (trials < 2) throw std::invalid_argument("projection stats need at least 2 trials");
  const Eigen::MatrixXd gram = u.transpose() * u;
  if ((gram - Eigen::MatrixXd::Identity(c, c)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("projection basis is not orthonormal");

  const double sigma2 = 1.0 / static_cast<double>(d);
  double sum = 0.0, sumsq = 0.0, col_pairs = 0.0, row_pairs = 0.0, first_pair = 0.0;
  for (Index t = 0; t < trials; ++t) {
    const SignalMatrix r = gaussian_signals(n, d, derive_seed(seed, static_cast<std::uint64_t>(t)));
    const Eigen::MatrixXd p = u.transpose() * r;
    sum += p.sum();
    sumsq += p.squaredNorm();
    col_pairs += (p.topRows(c - 1).array() * p.bottomRows(c - 1).array()).sum();
    row_pairs += (p.leftCols(d - 1).array() * p.rightCols(d - 1).array()).sum();
    first_pair += p(0, 0) * p(1, 0);
  }

  const double tr = static_cast<double>(trials);
  const double entries = tr * static_cast<double>(c * d);
  const double n_col_pairs = tr * static_cast<double>((c - 1) * d);
  const double n_row_pairs = tr * static_cast<double>(c * (d - 1));
  auto check = [](double estimate, double expected, double se) {
    return MomentCheck{estimate, expected, se, std::abs(estimate - expected) < 4.0 * se};
  };

  ProjectionStatsReport report;
  report.trials = trials;
  report.sigma2 = sigma2;
  const double mean = sum / entries;
  report.mean = check(mean, 0.0, std::sqrt(sigma2 / entries));
  report.variance = check(sumsq / entries - mean * mean, sigma2, sigma2 * std::sqrt(2.0 / (entries - 1.0)));
  report.cov_same_column = check(col_pairs / n_col_pairs, 0.0, sigma2 / std::sqrt(n_col_pairs));
  report.cov_same_row = check(row_pairs / n_row_pairs, 0.0, sigma2 / std::sqrt(n_row_pairs));
  report.cov_first_pair = check(first_pair / tr, 0.0, sigma2 / std::sqrt(tr));
  return report;
}

}  // namespace fears
