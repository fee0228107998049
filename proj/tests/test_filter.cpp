#include "support.hpp"

#include "fears/filtering.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>

using namespace fears;
using fears::testing::diagonal_operator;
using fears::testing::max_principal_angle;
using fears::testing::orthonormal_span;
using fears::testing::random_gaussian;

namespace {

struct GridStats {
  double overshoot = 0.0;  // max(p) - 1
  double l2 = 0.0;         // RMS error against the indicator
};

GridStats grid_stats(const PolyFilter& p, int points = 1000) {
  GridStats s;
  double sq = 0.0;
  for (int i = 0; i < points; ++i) {
    const double lambda = p.lambda_max * i / (points - 1);
    const double v = p(lambda);
    const double target = lambda <= p.cutoff ? 1.0 : 0.0;
    s.overshoot = std::max(s.overshoot, v - 1.0);
    sq += (v - target) * (v - target);
  }
  s.l2 = std::sqrt(sq / points);
  return s;
}

// Closed form of the Chebyshev coefficients of 1[x <= b] on [-1, 1]:
// c_0 = (pi - acos b) / pi, c_j = -2 sin(j acos b) / (pi j).
std::vector<double> indicator_coeffs_closed_form(double b, int m) {
  const double t = std::acos(b);
  std::vector<double> c(static_cast<std::size_t>(m + 1));
  c[0] = (std::numbers::pi - t) / std::numbers::pi;
  for (int j = 1; j <= m; ++j) c[static_cast<std::size_t>(j)] = -2.0 * std::sin(j * t) / (std::numbers::pi * j);
  return c;
}

}  // namespace

TEST(Signals, Deterministic) {
  EXPECT_EQ(gaussian_signals(50, 4, 9), gaussian_signals(50, 4, 9));
  EXPECT_NE(gaussian_signals(50, 4, 9), gaussian_signals(50, 4, 10));
}

TEST(Signals, ColumnsGeneratedIndependently) {
  const SignalMatrix r = gaussian_signals(40, 6, 3);
  Eigen::VectorXd col(40);
  fill_gaussian_column(col, 6, 3, 4);
  EXPECT_EQ(col, r.col(4));
  // Widening the block only rescales existing columns, since the variance is 1/d.
  const SignalMatrix wide = gaussian_signals(40, 8, 3);
  EXPECT_LT((wide.leftCols(6) * std::sqrt(8.0 / 6.0) - r).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Signals, SampleVariance) {
  const SignalMatrix r = gaussian_signals(100000, 20, 1);
  const double mean = r.mean();
  const double var = (r.array() - mean).square().mean();
  // SE of the sample variance is 0.05 * sqrt(2 / 2e6) = 5e-5; 0.002 is a wide window.
  EXPECT_LT(std::abs(var - 0.05), 0.002);
  EXPECT_TRUE(r.allFinite());
}

TEST(Signals, ColumnMeansWithinCltBound) {
  const Index n = 10000, d = 10;
  const double bound = 4.0 / std::sqrt(static_cast<double>(n * d));
  int good = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const SignalMatrix r = gaussian_signals(n, d, seed);
    if ((r.colwise().mean().array().abs() < bound).all()) ++good;
  }
  EXPECT_GE(good, 990);
}

TEST(Chebyshev, JacksonFactors) {
  for (int m : {1, 10, 50, 500}) {
    const auto g = jackson_factors(m);
    ASSERT_EQ(g.size(), static_cast<std::size_t>(m + 1));
    EXPECT_NEAR(g[0], 1.0, 1e-14);
    for (int j = 1; j <= m; ++j) {
      EXPECT_LE(g[static_cast<std::size_t>(j)], g[static_cast<std::size_t>(j - 1)] + 1e-15);
      EXPECT_GE(g[static_cast<std::size_t>(j)], 0.0);
    }
  }
}

TEST(Chebyshev, CoefficientsMatchClosedForm) {
  for (double b : {-0.7, -0.2, 0.35, 0.9}) {
    for (int m : {10, 40}) {
      const auto exact = indicator_coeffs_closed_form(b, m);
      // A discontinuous integrand costs the midpoint-type rule O(1/nodes).
      for (int nodes : {default_quadrature_nodes(m), 20000}) {
        const auto c = chebyshev_coefficients([b](double x) { return x <= b ? 1.0 : 0.0; }, m, nodes);
        for (int j = 0; j <= m; ++j)
          EXPECT_NEAR(c[static_cast<std::size_t>(j)], exact[static_cast<std::size_t>(j)], 4.0 / nodes)
              << "b=" << b << " m=" << m << " j=" << j;
      }
    }
  }
}

TEST(Chebyshev, CoefficientsExactOnPolynomials) {
  // x^3 = (3 T_1 + T_3) / 4
  const auto c = chebyshev_coefficients([](double x) { return x * x * x; }, 5, 12);
  EXPECT_NEAR(c[1], 0.75, 1e-14);
  EXPECT_NEAR(c[3], 0.25, 1e-14);
  EXPECT_NEAR(c[0], 0.0, 1e-14);
  EXPECT_NEAR(c[5], 0.0, 1e-14);
}

TEST(Chebyshev, LowpassPassAndStopBands) {
  for (double lmax : {2.0, 37.5}) {
    for (double frac : {0.05, 0.25, 0.5, 0.75}) {
      const double cutoff = frac * lmax;
      const PolyFilter p = ideal_lowpass_coeffs(cutoff, lmax, 200, Damping::jackson);
      EXPECT_GE(p(cutoff / 2), 0.95);
      EXPECT_LE(p(cutoff / 2), 1.05);
      const double stop = std::min(2.0 * cutoff, 0.5 * (cutoff + lmax));
      EXPECT_GE(p(stop), -0.05);
      EXPECT_LE(p(stop), 0.05);
      EXPECT_GE(p(0.0), 0.9);
      EXPECT_LE(p(0.0), 1.1);
    }
  }
}

TEST(Chebyshev, ValueAtZeroNearOneFromOrderThirty) {
  for (int m : {30, 60, 120}) {
    for (double cutoff : {0.3, 1.0, 1.7}) {
      const double v = ideal_lowpass_coeffs(cutoff, 2.0, m, Damping::jackson)(0.0);
      EXPECT_GE(v, 0.9);
      EXPECT_LE(v, 1.1);
    }
  }
}

TEST(Chebyshev, JacksonHasNoOvershoot) {
  for (int m : {50, 100, 200, 500}) {
    for (double cutoff : {0.01, 0.1, 0.5, 1.3}) {
      const PolyFilter damped = ideal_lowpass_coeffs(cutoff, 2.0, m, Damping::jackson);
      const PolyFilter plain = ideal_lowpass_coeffs(cutoff, 2.0, m, Damping::none);
      const double over_damped = grid_stats(damped).overshoot;
      EXPECT_LE(over_damped, 0.02) << "m=" << m << " cutoff=" << cutoff;
      EXPECT_LE(over_damped, grid_stats(plain).overshoot);
    }
  }
}

TEST(Chebyshev, L2ErrorDecreasesWithOrder) {
  for (double cutoff : {0.05, 0.3, 1.0}) {
    double previous = std::numeric_limits<double>::infinity();
    for (int m : {50, 100, 200, 500}) {
      const double l2 = grid_stats(ideal_lowpass_coeffs(cutoff, 2.0, m, Damping::jackson)).l2;
      EXPECT_LE(l2, previous) << "cutoff=" << cutoff << " m=" << m;
      previous = l2;
    }
  }
}

TEST(Chebyshev, RejectsBadArguments) {
  EXPECT_THROW(ideal_lowpass_coeffs(2.0, 2.0, 10, Damping::jackson), std::invalid_argument);
  EXPECT_THROW(ideal_lowpass_coeffs(0.0, 2.0, 10, Damping::jackson), std::invalid_argument);
  EXPECT_THROW(ideal_lowpass_coeffs(1.0, 2.0, 0, Damping::jackson), std::invalid_argument);
  EXPECT_THROW(ideal_lowpass_coeffs(1.0, 2.0, 10, Damping::jackson, 21), std::invalid_argument);
  EXPECT_NO_THROW(ideal_lowpass_coeffs(1.0, 2.0, 10, Damping::jackson, 22));
}

TEST(ApplyFilter, ConstantFilterIsIdentity) {
  const auto L = laplacian(sensor_graph(120, 6, 1), LaplacianVariant::combinatorial);
  const SignalMatrix x = random_gaussian(120, 5, 2);
  OpCounter counter;
  const SignalMatrix y = apply_filter(L, constant_filter(L.lambda_max_bound, 17), x, &counter);
  EXPECT_LT((y - x).norm() / x.norm(), 1e-12);
  EXPECT_EQ(counter.block_products, 17u);
  EXPECT_EQ(counter.spmv, 17u * 5u);
}

TEST(ApplyFilter, CountsExactlyMProducts) {
  const auto L = laplacian(cycle_graph(30), LaplacianVariant::normalized);
  for (int m : {1, 2, 7, 50}) {
    OpCounter counter;
    apply_filter(L, ideal_lowpass_coeffs(0.5, 2.0, m, Damping::jackson), random_gaussian(30, 3, 1), &counter);
    EXPECT_EQ(counter.block_products, static_cast<std::uint64_t>(m));
    EXPECT_EQ(counter.spmv, static_cast<std::uint64_t>(3 * m));
    EXPECT_EQ(counter.filter_calls, 1u);
  }
}

TEST(ApplyFilter, ScalarConsistency) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  Eigen::VectorXd lambdas(100);
  for (auto& v : lambdas) v = u(rng);
  lambdas[0] = 0.0;
  lambdas[1] = 3.0;
  const LaplacianOperator op = diagonal_operator(lambdas, 3.0);
  for (Damping damping : {Damping::jackson, Damping::none}) {
    const PolyFilter p = ideal_lowpass_coeffs(1.1, 3.0, 120, damping);
    const SignalMatrix y = apply_filter(op, p, SignalMatrix::Identity(100, 100));
    for (Index i = 0; i < 100; ++i) EXPECT_NEAR(y(i, i), p(lambdas[i]), 1e-10);
  }
}

TEST(ApplyFilter, Linearity) {
  const auto L = laplacian(generate_sbm(150, 3, 0.1, 8.0, 4).graph, LaplacianVariant::normalized);
  const PolyFilter p = ideal_lowpass_coeffs(0.2, 2.0, 80, Damping::jackson);
  const SignalMatrix x = random_gaussian(150, 4, 1), y = random_gaussian(150, 4, 2);
  const double a = 1.7, b = -0.3;
  const SignalMatrix lhs = apply_filter(L, p, a * x + b * y);
  const SignalMatrix rhs = a * apply_filter(L, p, x) + b * apply_filter(L, p, y);
  EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-10);
}

TEST(ApplyFilter, ThreadSplitIsBitIdentical) {
  const auto L = laplacian(sensor_graph(300, 8, 7), LaplacianVariant::normalized);
  const PolyFilter p = ideal_lowpass_coeffs(0.1, 2.0, 60, Damping::jackson);
  const SignalMatrix x = random_gaussian(300, 11, 3);
  const SignalMatrix serial = apply_filter(L, p, x);
  for (int threads : {2, 3, 4, 11, 32}) EXPECT_TRUE((apply_filter(L, p, x, nullptr, threads).array() == serial.array()).all());
  // A column filtered alone matches the same column filtered in a block.
  EXPECT_TRUE((apply_filter(L, p, x.col(5)).array() == serial.col(5).array()).all());
}

TEST(ApplyFilter, Errors) {
  const auto L = laplacian(cycle_graph(10), LaplacianVariant::combinatorial);
  EXPECT_THROW(apply_filter(L, constant_filter(L.lambda_max_bound, 3), random_gaussian(9, 2, 1)), std::invalid_argument);
  EXPECT_THROW(apply_filter(L, constant_filter(0.5 * L.lambda_max_bound, 3), random_gaussian(10, 2, 1)),
               std::invalid_argument);
}

TEST(ApplyFilter, MatchesExactProjectorOnSmallGraph) {
  // Four planted communities give a clear gap after the fourth eigenvalue.
  const auto L = laplacian(generate_sbm(200, 4, 0.05, 12.0, 3).graph, LaplacianVariant::normalized);
  const auto spec = dense_eigendecomposition(L);
  const Index k = 4;
  ASSERT_GT(spec.eigenvalues[k] - spec.eigenvalues[k - 1], 0.05);
  const double cutoff = separating_cutoff(spec.eigenvalues, k);
  const SignalMatrix x = random_gaussian(200, k, 9);
  const SignalMatrix approx = apply_filter(L, ideal_lowpass_coeffs(cutoff, 2.0, 500, Damping::jackson), x);
  const Eigen::MatrixXd uk = spec.leading(k);
  const SignalMatrix exact = uk * (uk.transpose() * x);
  EXPECT_LT(max_principal_angle(orthonormal_span(approx), orthonormal_span(exact)), 1e-3);
}

TEST(ExactFilter, IdentityAndProjector) {
  const auto L = laplacian(sensor_graph(150, 7, 5), LaplacianVariant::combinatorial);
  const auto spec = dense_eigendecomposition(L);
  const SignalMatrix x = random_gaussian(150, 6, 4);
  const SignalMatrix same = exact_filter(spec.eigenvectors, spec.eigenvalues, [](double) { return 1.0; }, x);
  EXPECT_LT((same - x).cwiseAbs().maxCoeff(), 1e-10);

  const Index k = 12;
  const double cutoff = separating_cutoff(spec.eigenvalues, k);
  const SignalMatrix proj =
      exact_filter(spec.eigenvectors, spec.eigenvalues, [cutoff](double l) { return l <= cutoff ? 1.0 : 0.0; }, x);
  const Eigen::MatrixXd uk = spec.leading(k);
  EXPECT_LT((proj - uk * (uk.transpose() * x)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(proj.norm(), x.norm());
  for (Index c = 0; c < x.cols(); ++c) EXPECT_LE(proj.col(c).norm(), x.col(c).norm() * (1 + 1e-12));
}

TEST(ExactFilter, RespectsOracleCap) {
  const auto L = laplacian(cycle_graph(40), LaplacianVariant::normalized);
  const auto spec = dense_eigendecomposition(L);
  ::setenv("FEARS_ORACLE_CAP", "30", 1);
  EXPECT_THROW(exact_filter(spec.eigenvectors, spec.eigenvalues, [](double) { return 1.0; }, random_gaussian(40, 1, 1)),
               std::invalid_argument);
  EXPECT_THROW(dense_eigendecomposition(L), std::invalid_argument);
  ::unsetenv("FEARS_ORACLE_CAP");
  EXPECT_NO_THROW(dense_eigendecomposition(L));
}

TEST(ChebyshevLowpass, EdgeCutoffs) {
  const auto L = laplacian(cycle_graph(20), LaplacianVariant::normalized);
  OpCounter counter;
  const ChebyshevLowpass filter(L, 40, Damping::jackson, &counter);
  const SignalMatrix x = random_gaussian(20, 2, 1);
  EXPECT_EQ(filter.apply(2.0, x), x);  // identity at lambda_max
  EXPECT_EQ(counter.spmv, 0u);
  EXPECT_EQ(filter.apply(0.0, x), filter.apply(filter.min_cutoff(), x));
  EXPECT_EQ(filter.apply(-1.0, x), filter.apply(filter.min_cutoff(), x));
  EXPECT_GT(filter.min_cutoff(), 0.0);
  EXPECT_THROW(ChebyshevLowpass(L, 0), std::invalid_argument);
}

TEST(ChebyshevLowpass, SmallestCutoffStillPassesZero) {
  const auto L = laplacian(cycle_graph(20), LaplacianVariant::normalized);
  for (int m : {30, 50, 100, 500, 2000}) {
    const ChebyshevLowpass filter(L, m);
    const PolyFilter p = ideal_lowpass_coeffs(filter.min_cutoff(), L.lambda_max_bound, m, Damping::jackson);
    EXPECT_GE(p(0.0), 0.9) << "m=" << m;
    EXPECT_LE(p(0.0), 1.1) << "m=" << m;
  }
}
