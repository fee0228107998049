#include "fears/signals.hpp"

#include "fears/random.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fears {

void fill_gaussian_column(Eigen::Ref<Eigen::VectorXd> column, Index d, std::uint64_t seed, Index column_index) {
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(column_index)));
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  for (Index i = 0; i < column.size(); ++i) column[i] = normal(rng);
}

SignalMatrix gaussian_signals(Index n, Index d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("gaussian_signals needs N >= 1 and d >= 1");
  SignalMatrix r(n, d);
  for (Index j = 0; j < d; ++j) fill_gaussian_column(r.col(j), d, seed, j);
  return r;
}

}  // namespace fears
