#pragma once

#include "fears/eigencount.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace fears {

enum class Orthonormalization { svd, qr };
Orthonormalization parse_orthonormalization(std::string_view name);

struct EigenspaceOptions {
  Index d = 0;  // number of random signals; 0 means d = k
  int m = 500;
  std::uint64_t seed = 0;
  std::optional<double> lambda_k;  // fixed cutoff; estimated when empty
  LambdaSearch search = LambdaSearch::fast;
  int max_iter = 10;     // fast search
  double tol_eps = 0.1;  // dichotomy search
  Damping damping = Damping::jackson;
  Orthonormalization orthonormalization = Orthonormalization::svd;
  int threads = 1;
};

struct EigenspaceDiagnostics {
  int m = 0;
  Index d = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t signal_seed = 0;
  std::uint64_t probe_seed = 0;
  bool lambda_estimated = false;
  int lambda_iterations = 0;
  bool lambda_converged = true;
  std::vector<Probe> lambda_history;
  std::uint64_t filter_spmv = 0;  // products spent on M = g(L) R
  std::uint64_t probe_spmv = 0;   // products spent on lambda_k probes
  OpCounter ops;                  // totals
};

/// Orthonormal N x k basis B approximating span(U_k), with the leading
/// singular values of the sketch M = g(L) R.
struct EigenspaceApprox {
  Eigen::MatrixXd basis;
  Eigen::VectorXd singular_values;
  double lambda_k_used = 0.0;
  EigenspaceDiagnostics diagnostics;
};

/// Thrown when the sketch is numerically rank deficient (probability zero
/// for Gaussian signals and an exact filter).
class RankDeficientSketch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Eigenspace approximation from filtered random signals:
 *   1. R = gaussian_signals(N, d, signal seed)
 *   2. lambda_k by the configured search unless fixed
 *   3-4. M = g_{lambda_k}(L) R through the filter family
 *   5. economic SVD of M; B = top-k left singular vectors.
 *
 * The LaplacianOperator overload uses the Jackson-Chebyshev filter of order
 * options.m; the LowpassFilter overload accepts any family (e.g. the exact
 * oracle filter).
 */
EigenspaceApprox approximate_eigenspace(const LaplacianOperator& L, Index k, const EigenspaceOptions& options);
EigenspaceApprox approximate_eigenspace(const LowpassFilter& filter, Index k, const EigenspaceOptions& options,
                                        OpCounter* filter_counter = nullptr);

/// The same pipeline stopped before the SVD: returns M itself.
SignalMatrix raw_sketch(const LaplacianOperator& L, Index k, Index d, double lambda_k, int m, std::uint64_t seed,
                        OpCounter* counter = nullptr);
SignalMatrix raw_sketch(const LowpassFilter& filter, Index d, double lambda_k, std::uint64_t seed);

/// Orthonormalizes the columns of `sketch` and keeps k of them. Exposed so
/// callers holding a sketch can finish the pipeline themselves.
EigenspaceApprox orthonormalize_sketch(const SignalMatrix& sketch, Index k, Orthonormalization method,
                                       OpCounter* counter = nullptr);

/// Sub-seeds derived from one master seed.
std::uint64_t signal_seed_for(std::uint64_t master_seed);
std::uint64_t probe_seed_for(std::uint64_t master_seed);

struct MomentCheck {
  double estimate = 0.0;
  double expected = 0.0;
  double standard_error = 0.0;
  bool pass = false;  // |estimate - expected| < 4 * standard_error
};

/// Empirical moments of the entries of U^T R over repeated Gaussian draws.
struct ProjectionStatsReport {
  Index trials = 0;
  double sigma2 = 0.0;
  MomentCheck mean;                 // pooled over all entries
  MomentCheck variance;             // pooled over all entries
  MomentCheck cov_same_column;      // adjacent rows, same column (pooled)
  MomentCheck cov_same_row;         // adjacent columns, same row (pooled)
  MomentCheck cov_first_pair;       // entries (0,0) and (1,0) across trials
  bool all_pass() const {
    return mean.pass && variance.pass && cov_same_column.pass && cov_same_row.pass && cov_first_pair.pass;
  }
};

/// U must have orthonormal columns (checked to 1e-8); R is drawn as
/// gaussian_signals(N, d, .) with variance 1/d for each trial.
ProjectionStatsReport gaussian_projection_stats(const Eigen::MatrixXd& u, Index d, Index trials,
                                                std::uint64_t seed);

}  // namespace fears
