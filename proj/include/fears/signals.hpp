#pragma once

#include "fears/graph.hpp"

#include <cstdint>

namespace fears {

/// Dense N x d column-major block of graph signals.
using SignalMatrix = Eigen::MatrixXd;

/// i.i.d. N(0, 1/d) entries. Column j depends only on (seed, j), so any
/// subset of columns can be generated independently and identically.
SignalMatrix gaussian_signals(Index n, Index d, std::uint64_t seed);

void fill_gaussian_column(Eigen::Ref<Eigen::VectorXd> column, Index d, std::uint64_t seed, Index column_index);

}  // namespace fears
