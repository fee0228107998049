#include "fears/filtering.hpp"

#include "fears/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fears {

OpCounter& OpCounter::operator+=(const OpCounter& other) {
  spmv += other.spmv;
  block_products += other.block_products;
  filter_calls += other.filter_calls;
  qr_calls += other.qr_calls;
  qr_cost += other.qr_cost;
  svd_calls += other.svd_calls;
  svd_core_cost += other.svd_core_cost;
  return *this;
}

namespace {

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Chebyshev recurrence for one contiguous column block. The block is kept
// row-major so each sparse row gathers whole neighbour rows; every column
// still sees the same sequence of operations whatever the block width.
void filter_block(const SparseMatrix& L, const PolyFilter& filter, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  Eigen::Ref<Eigen::MatrixXd> y) {
  const int m = filter.degree();
  const double scale = 2.0 / filter.lambda_max;
  const auto& c = filter.coeffs;

  RowBlock t_prev = x;
  RowBlock acc = c[0] * t_prev;
  if (m > 0) {
    RowBlock lt(x.rows(), x.cols());
    lt.noalias() = L * t_prev;
    RowBlock t_cur = scale * lt - t_prev;
    acc += c[1] * t_cur;

    RowBlock t_next(x.rows(), x.cols());
    for (int j = 2; j <= m; ++j) {
      lt.noalias() = L * t_cur;
      t_next = (2.0 * scale) * lt - 2.0 * t_cur - t_prev;
      acc += c[static_cast<std::size_t>(j)] * t_next;
      std::swap(t_prev, t_cur);
      std::swap(t_cur, t_next);
    }
  }
  y = acc;
}

}  // namespace

SignalMatrix apply_filter(const LaplacianOperator& L, const PolyFilter& filter, const SignalMatrix& x,
                          OpCounter* counter, int threads) {
  if (x.rows() != L.size())
    throw std::invalid_argument("apply_filter: signal has " + std::to_string(x.rows()) + " rows, operator is " +
                                std::to_string(L.size()));
  if (filter.coeffs.empty()) throw std::invalid_argument("apply_filter: empty filter");
  if (filter.lambda_max < L.lambda_max_bound * (1.0 - 1e-12))
    throw std::invalid_argument("apply_filter: filter interval does not cover the operator spectrum bound");

  SignalMatrix y(x.rows(), x.cols());
  const Index cols = x.cols();
  const Index workers = std::clamp<Index>(threads, 1, std::max<Index>(cols, 1));
  if (workers <= 1) {
    filter_block(L.matrix, filter, x, y);
  } else {
    std::vector<std::thread> pool;
    const Index base = cols / workers, extra = cols % workers;
    Index start = 0;
    for (Index w = 0; w < workers; ++w) {
      const Index width = base + (w < extra ? 1 : 0);
      pool.emplace_back([&, start, width] {
        filter_block(L.matrix, filter, x.middleCols(start, width), y.middleCols(start, width));
      });
      start += width;
    }
    for (auto& t : pool) t.join();
  }

  if (counter) {
    counter->spmv += static_cast<std::uint64_t>(filter.degree()) * static_cast<std::uint64_t>(cols);
    counter->block_products += static_cast<std::uint64_t>(filter.degree());
    counter->filter_calls += 1;
  }
  return y;
}

SignalMatrix exact_filter(const Eigen::MatrixXd& eigenvectors, const Eigen::VectorXd& eigenvalues,
                          const std::function<double(double)>& g, const SignalMatrix& x) {
  const Index n = eigenvectors.rows();
  if (n > oracle_cap())
    throw std::invalid_argument("exact_filter: N = " + std::to_string(n) + " exceeds oracle cap " +
                                std::to_string(oracle_cap()));
  if (eigenvectors.cols() != n || eigenvalues.size() != n)
    throw std::invalid_argument("exact_filter needs a full eigendecomposition");
  if (x.rows() != n) throw std::invalid_argument("exact_filter: dimension mismatch");

  // Only eigenvectors with g != 0 contribute.
  std::vector<Index> active;
  Eigen::VectorXd gains(n);
  for (Index i = 0; i < n; ++i) {
    gains[i] = g(eigenvalues[i]);
    if (gains[i] != 0.0) active.push_back(i);
  }
  if (active.empty()) return SignalMatrix::Zero(n, x.cols());

  const Index a = static_cast<Index>(active.size());
  Eigen::MatrixXd u(n, a);
  Eigen::VectorXd ga(a);
  for (Index j = 0; j < a; ++j) {
    u.col(j) = eigenvectors.col(active[static_cast<std::size_t>(j)]);
    ga[j] = gains[active[static_cast<std::size_t>(j)]];
  }
  Eigen::MatrixXd coeffs = u.transpose() * x;
  coeffs = ga.asDiagonal() * coeffs;
  return u * coeffs;
}

ChebyshevLowpass::ChebyshevLowpass(const LaplacianOperator& L, int m, Damping damping, OpCounter* counter,
                                   int threads)
    : L_(L), m_(m), damping_(damping), counter_(counter), threads_(threads) {
  if (m < 1) throw std::invalid_argument("filter order m must be >= 1");
  if (!(L.lambda_max_bound > 0.0)) throw std::invalid_argument("operator has no positive spectrum bound");
}

double ChebyshevLowpass::min_cutoff() const {
  // Two Jackson resolution steps in the angular variable, measured from
  // lambda = 0. One step leaves p(0) near 0.7; two bring it to about 0.97.
  const double step = 2.0 * std::numbers::pi / (m_ + 2);
  return 0.5 * L_.lambda_max_bound * (1.0 - std::cos(step));
}

SignalMatrix ChebyshevLowpass::apply(double cutoff, const SignalMatrix& x) const {
  if (cutoff >= L_.lambda_max_bound) return x;
  const double c = std::max(cutoff, min_cutoff());
  const PolyFilter filter = ideal_lowpass_coeffs(c, L_.lambda_max_bound, m_, damping_);
  return apply_filter(L_, filter, x, counter_, threads_);
}

ExactLowpass::ExactLowpass(const ExactSpectrum& spectrum) : spectrum_(spectrum) {}

SignalMatrix ExactLowpass::apply(double cutoff, const SignalMatrix& x) const {
  const double limit = cutoff + eigenvalue_tolerance(spectrum_.lambda_max_bound);
  return exact_filter(spectrum_.eigenvectors, spectrum_.eigenvalues,
                      [limit](double lambda) { return lambda <= limit ? 1.0 : 0.0; }, x);
}

Index ExactLowpass::size() const { return spectrum_.size(); }

double ExactLowpass::lambda_max() const { return spectrum_.lambda_max_bound; }

}  // namespace fears
