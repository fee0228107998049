#pragma once

#include "fears/chebyshev.hpp"
#include "fears/laplacian.hpp"
#include "fears/signals.hpp"

#include <cstdint>
#include <functional>

namespace fears {

struct ExactSpectrum;

/// Work counters. `spmv` counts sparse matrix-vector products (one per
/// signal column per recurrence step); the dense counters record the
/// orthonormalization stage.
struct OpCounter {
  std::uint64_t spmv = 0;
  std::uint64_t block_products = 0;
  std::uint64_t filter_calls = 0;
  std::uint64_t qr_calls = 0;
  std::uint64_t qr_cost = 0;        // N * d^2
  std::uint64_t svd_calls = 0;
  std::uint64_t svd_core_cost = 0;  // d^3, the small d x d SVD

  OpCounter& operator+=(const OpCounter& other);
};

/**
 * p(L) X through the three-term Chebyshev recurrence on
 * (2/lambda_max) L - I. Uses exactly filter.degree() sparse block products
 * and never forms a dense N x N matrix. Columns are split into `threads`
 * contiguous blocks; each column's arithmetic is independent of the split.
 */
SignalMatrix apply_filter(const LaplacianOperator& L, const PolyFilter& filter, const SignalMatrix& x,
                          OpCounter* counter = nullptr, int threads = 1);

/// U g(Lambda) U^T X by dense products. Throws when N exceeds the oracle cap.
SignalMatrix exact_filter(const Eigen::MatrixXd& eigenvectors, const Eigen::VectorXd& eigenvalues,
                          const std::function<double(double)>& g, const SignalMatrix& x);

/// A family of low-pass operators indexed by their cutoff.
class LowpassFilter {
 public:
  virtual ~LowpassFilter() = default;
  virtual SignalMatrix apply(double cutoff, const SignalMatrix& x) const = 0;
  virtual Index size() const = 0;
  virtual double lambda_max() const = 0;
};

/// Jackson-Chebyshev (or plain Chebyshev) polynomial low-pass on a Laplacian.
/// A cutoff at or above lambda_max is the identity; a cutoff at or below 0 is
/// raised to the smallest resolvable cutoff of an order-m expansion.
class ChebyshevLowpass final : public LowpassFilter {
 public:
  ChebyshevLowpass(const LaplacianOperator& L, int m, Damping damping = Damping::jackson,
                   OpCounter* counter = nullptr, int threads = 1);

  SignalMatrix apply(double cutoff, const SignalMatrix& x) const override;
  Index size() const override { return L_.size(); }
  double lambda_max() const override { return L_.lambda_max_bound; }
  ChebyshevLowpass(LaplacianOperator&&, int, Damping = Damping::jackson, OpCounter* = nullptr, int = 1) = delete;

  int order() const { return m_; }
  double min_cutoff() const;

 private:
  const LaplacianOperator& L_;
  int m_;
  Damping damping_;
  OpCounter* counter_;
  int threads_;
};

/// Ideal indicator 1[lambda <= cutoff] applied through a full eigendecomposition.
class ExactLowpass final : public LowpassFilter {
 public:
  explicit ExactLowpass(const ExactSpectrum& spectrum);
  ExactLowpass(ExactSpectrum&&) = delete;  // holds a reference

  SignalMatrix apply(double cutoff, const SignalMatrix& x) const override;
  Index size() const override;
  double lambda_max() const override;

 private:
  const ExactSpectrum& spectrum_;
};

}  // namespace fears
