#pragma once

#include "fears/filtering.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace fears {

/// One eigencount evaluation together with the brackets after its update.
struct Probe {
  int iteration = 0;
  double lambda = 0.0;
  double count = 0.0;
  double lambda_lb = 0.0;
  double lambda_ub = 0.0;
  double count_lb = 0.0;
  double count_ub = 0.0;
  bool bisected = false;
};

struct LambdaEstimate {
  double lambda_est = 0.0;
  double count_est = 0.0;    // count observed at lambda_est
  double next_lambda = 0.0;  // unprobed step the fast search would take next
  int iterations = 0;
  bool converged = false;  // a probe's rounded count hit k
  std::vector<Probe> history;
};

/// ||g(L) R||_F^2 for the filter family at `cutoff`. With N(0, 1/d) entries
/// in R this is an unbiased estimate of sum_i g(lambda_i)^2, i.e. of the
/// number of eigenvalues below the cutoff for an ideal g.
double eigencount(const LowpassFilter& filter, double cutoff, const SignalMatrix& signals);

/// Convenience form: order-m Jackson-Chebyshev filter on L, fresh R(N, d, seed).
double eigencount(const LaplacianOperator& L, double lambda, Index d, int m, std::uint64_t seed,
                  OpCounter* counter = nullptr);

struct FastSearchOptions {
  Index d = 0;  // 0: use k
  int max_iter = 10;
  std::uint64_t seed = 0;
  bool fresh_signals = false;  // redraw R at every probe instead of reusing it
};

/**
 * Accelerated lambda_k search: start from k * lambda_max / N, interpolate
 * linearly between the count brackets, and bisect whenever a probe repeats a
 * bracket's (rounded) count. Stops as soon as a probe's rounded count is k.
 *
 * The lower bracket starts as a virtual probe (lambda 0, count 0) and the
 * upper one as (lambda_max, N).
 */
LambdaEstimate estimate_lambda_k_fast(const LowpassFilter& filter, Index k, const FastSearchOptions& options);

struct DichotomyOptions {
  Index d = 0;  // 0: use k
  double tol_eps = 0.1;
  int max_iter = 100;
  std::uint64_t seed = 0;
};

/// Plain bisection on [0, lambda_max]; stops when a probe's rounded count is
/// k or when the bracket is narrower than tol_eps relative to its upper end.
LambdaEstimate estimate_lambda_k_dichotomy(const LowpassFilter& filter, Index k, const DichotomyOptions& options);

enum class LambdaSearch { fast, dichotomy };
LambdaSearch parse_lambda_search(std::string_view name);

}  // namespace fears
