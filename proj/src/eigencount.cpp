#include "fears/eigencount.hpp"

#include "fears/random.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fears {

namespace {

long rounded(double count) { return std::lround(count); }

void check_search_args(const LowpassFilter& filter, Index k, Index d) {
  if (k < 1 || k > filter.size()) throw std::invalid_argument("lambda_k search needs 1 <= k <= N");
  if (d < 1) throw std::invalid_argument("lambda_k search needs d >= 1");
}

}  // namespace

LambdaSearch parse_lambda_search(std::string_view name) {
  if (name == "fast") return LambdaSearch::fast;
  if (name == "dichotomy") return LambdaSearch::dichotomy;
  throw std::invalid_argument("unknown lambda_k search: " + std::string(name));
}

double eigencount(const LowpassFilter& filter, double cutoff, const SignalMatrix& signals) {
  if (signals.rows() != filter.size()) throw std::invalid_argument("eigencount: dimension mismatch");
  return filter.apply(cutoff, signals).squaredNorm();
}

double eigencount(const LaplacianOperator& L, double lambda, Index d, int m, std::uint64_t seed,
                  OpCounter* counter) {
  if (!(lambda >= 0.0) || lambda > L.lambda_max_bound)
    throw std::invalid_argument("eigencount: lambda must lie in [0, lambda_max]");
  const ChebyshevLowpass filter(L, m, Damping::jackson, counter);
  return eigencount(filter, lambda, gaussian_signals(L.size(), d, seed));
}

LambdaEstimate estimate_lambda_k_fast(const LowpassFilter& filter, Index k, const FastSearchOptions& options) {
  const Index d = options.d > 0 ? options.d : k;
  check_search_args(filter, k, d);
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

  const Index n = filter.size();
  const double kd = static_cast<double>(k);
  double lambda_lb = 0.0, count_lb = 0.0;
  double lambda_ub = filter.lambda_max(), count_ub = static_cast<double>(n);
  double lambda_est = kd * filter.lambda_max() / static_cast<double>(n);

  SignalMatrix signals = gaussian_signals(n, d, options.seed);

  LambdaEstimate result;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (options.fresh_signals && iter > 0) signals = gaussian_signals(n, d, derive_seed(options.seed, iter));
    const double count = eigencount(filter, lambda_est, signals);
    result.iterations = iter + 1;
    result.count_est = count;

    Probe probe{iter + 1, lambda_est, count};
    if (rounded(count) == static_cast<long>(k)) {
      result.converged = true;
      result.lambda_est = lambda_est;
      result.next_lambda = lambda_est;
      probe.lambda_lb = lambda_lb;
      probe.lambda_ub = lambda_ub;
      probe.count_lb = count_lb;
      probe.count_ub = count_ub;
      result.history.push_back(probe);
      return result;
    }

    const bool below = count < kd;
    if (below)
      lambda_lb = lambda_est;
    else
      lambda_ub = lambda_est;

    if (rounded(count_lb) == rounded(count) || rounded(count_ub) == rounded(count)) {
      lambda_est = 0.5 * (lambda_lb + lambda_ub);
      probe.bisected = true;
    } else {
      if (below)
        count_lb = count;
      else
        count_ub = count;
      lambda_est = lambda_lb + (kd - count_lb) * (lambda_ub - lambda_lb) / (count_ub - count_lb);
    }
    probe.lambda_lb = lambda_lb;
    probe.lambda_ub = lambda_ub;
    probe.count_lb = count_lb;
    probe.count_ub = count_ub;
    result.history.push_back(probe);
  }
  // Without convergence, fall back on the probe whose count came closest to k
  // (latest wins ties) rather than the unprobed next step, which is often a
  // bisection midpoint far beyond an eigengap.
  result.next_lambda = lambda_est;
  const Probe* best = &result.history.front();
  for (const Probe& p : result.history)
    if (std::abs(p.count - kd) <= std::abs(best->count - kd)) best = &p;
  result.lambda_est = best->lambda;
  result.count_est = best->count;
  return result;
}

LambdaEstimate estimate_lambda_k_dichotomy(const LowpassFilter& filter, Index k,
                                           const DichotomyOptions& options) {
  const Index d = options.d > 0 ? options.d : k;
  check_search_args(filter, k, d);
  if (!(options.tol_eps > 0.0)) throw std::invalid_argument("tol_eps must be positive");

  const Index n = filter.size();
  const double kd = static_cast<double>(k);
  double lambda_lb = 0.0, lambda_ub = filter.lambda_max();
  double count_lb = 0.0, count_ub = static_cast<double>(n);
  const SignalMatrix signals = gaussian_signals(n, d, options.seed);

  LambdaEstimate result;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const double lambda = 0.5 * (lambda_lb + lambda_ub);
    const double count = eigencount(filter, lambda, signals);
    result.iterations = iter + 1;
    result.lambda_est = lambda;
    result.next_lambda = lambda;
    result.count_est = count;

    if (rounded(count) == static_cast<long>(k)) {
      result.converged = true;
      result.history.push_back({iter + 1, lambda, count, lambda_lb, lambda_ub, count_lb, count_ub, true});
      return result;
    }
    if (count < kd) {
      lambda_lb = lambda;
      count_lb = count;
    } else {
      lambda_ub = lambda;
      count_ub = count;
    }
    result.history.push_back({iter + 1, lambda, count, lambda_lb, lambda_ub, count_lb, count_ub, true});
    if (lambda_ub - lambda_lb < options.tol_eps * lambda_ub) break;
  }
  return result;
}

}  // namespace fears
