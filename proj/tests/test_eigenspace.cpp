#include "support.hpp"

#include "fears/eigenspace.hpp"
#include "fears/metrics.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace fears;
using fears::testing::max_principal_angle;
using fears::testing::orthonormal_span;
using fears::testing::random_orthonormal;

namespace {

double projector_gap(const Eigen::MatrixXd& b, const Eigen::MatrixXd& u) {
  return (b * b.transpose() - u * u.transpose()).norm();
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) { return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues(); }

}  // namespace

TEST(Eigenspace, ExactRecoveryWithOracleCutoff) {
  const auto L = laplacian(sensor_graph(100, 6, 3), LaplacianVariant::normalized);
  const auto spec = dense_eigendecomposition(L);
  const Index k = 5;
  ASSERT_TRUE(fears::testing::has_gap(spec.eigenvalues, k));
  const ExactLowpass exact(spec);
  EigenspaceOptions opts;
  opts.seed = 11;
  opts.lambda_k = separating_cutoff(spec.eigenvalues, k);
  for (auto method : {Orthonormalization::svd, Orthonormalization::qr}) {
    opts.orthonormalization = method;
    const auto approx = approximate_eigenspace(exact, k, opts);
    const Eigen::MatrixXd uk = spec.leading(k);
    EXPECT_LT(projector_gap(approx.basis, uk), 1e-8);
    const Eigen::MatrixXd q = approx.basis.transpose() * uk;
    EXPECT_LT((q.transpose() * q - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-8);
    EXPECT_NEAR(mean_energy(approx.basis, uk), 1.0, 1e-10);
  }
}

TEST(Eigenspace, BasisInvariants) {
  const auto L = laplacian(generate_sbm(400, 5, 0.1, 10.0, 2).graph, LaplacianVariant::normalized);
  EigenspaceOptions opts;
  opts.m = 150;
  opts.seed = 4;
  for (Index d : {5, 9}) {
    opts.d = d;
    const auto approx = approximate_eigenspace(L, 5, opts);
    ASSERT_EQ(approx.basis.cols(), 5);
    EXPECT_LT((approx.basis.transpose() * approx.basis - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
    for (Index i = 0; i < approx.singular_values.size(); ++i) {
      EXPECT_GE(approx.singular_values[i], 0.0);
      if (i > 0) {
        EXPECT_LE(approx.singular_values[i], approx.singular_values[i - 1]);
      }
    }
    EXPECT_EQ(approx.diagnostics.d, d);
    EXPECT_TRUE(approx.diagnostics.lambda_estimated);
    EXPECT_GE(approx.lambda_k_used, 0.0);
  }
}

TEST(Eigenspace, DeterministicGivenSeed) {
  const auto L = laplacian(sensor_graph(300, 7, 1), LaplacianVariant::normalized);
  EigenspaceOptions opts;
  opts.m = 100;
  opts.seed = 8;
  const auto a = approximate_eigenspace(L, 6, opts);
  opts.threads = 3;
  const auto b = approximate_eigenspace(L, 6, opts);
  EXPECT_TRUE((a.basis.array() == b.basis.array()).all());
  EXPECT_EQ(a.lambda_k_used, b.lambda_k_used);
  EXPECT_NE(a.diagnostics.signal_seed, a.diagnostics.probe_seed);
}

TEST(Eigenspace, FullBasisWhenKEqualsN) {
  const auto L = laplacian(cycle_graph(12), LaplacianVariant::combinatorial);
  const auto spec = dense_eigendecomposition(L);
  const ExactLowpass exact(spec);
  EigenspaceOptions opts;
  opts.lambda_k = spec.lambda_max_bound;
  const auto approx = approximate_eigenspace(exact, 12, opts);
  EXPECT_NEAR(mean_energy(approx.basis, spec.eigenvectors), 1.0, 1e-10);
}

TEST(Eigenspace, RawSketchSharesColumnSpace) {
  const auto L = laplacian(sensor_graph(200, 7, 6), LaplacianVariant::normalized);
  const auto spec = dense_eigendecomposition(L);
  const ExactLowpass exact(spec);
  const Index k = 8;
  const double cutoff = separating_cutoff(spec.eigenvalues, k);
  EigenspaceOptions opts;
  opts.seed = 5;
  opts.lambda_k = cutoff;
  const auto approx = approximate_eigenspace(exact, k, opts);
  const SignalMatrix m = raw_sketch(exact, k, cutoff, 5);
  EXPECT_LT(max_principal_angle(orthonormal_span(m), approx.basis), 1e-6);
  EXPECT_LT((singular_values(m) - approx.singular_values).cwiseAbs().maxCoeff(), 1e-10);

  // The Laplacian overload runs the same pipeline with the polynomial filter.
  OpCounter counter;
  const SignalMatrix poly = raw_sketch(L, k, k, cutoff, 300, 5, &counter);
  EXPECT_EQ(counter.spmv, 300u * k);
  opts.m = 300;
  const auto poly_approx = approximate_eigenspace(L, k, opts);
  EXPECT_LT(max_principal_angle(orthonormal_span(poly), poly_approx.basis), 1e-6);
  EXPECT_LT((singular_values(poly) - poly_approx.singular_values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Eigenspace, QuarterCircleSingularValues) {
  // With an ideal filter M = U_k U_k^T R, so s(M) = s(U_k^T R): a k x k
  // Gaussian with variance 1/k, whose singular values follow the quarter
  // circle density sqrt(4 - x^2) / pi on [0, 2].
  const Index n = 5000, k = 200;
  const Eigen::MatrixXd uk = random_orthonormal(n, k, 3);
  const Eigen::VectorXd s = singular_values(uk.transpose() * gaussian_signals(n, k, 9));
  const double below_one = (s.array() < 1.0).cast<double>().mean();
  const double expected = (std::sqrt(3.0) / 2.0 + std::numbers::pi / 3.0) / std::numbers::pi;  // ~0.609
  EXPECT_NEAR(below_one, expected, 0.05);
  EXPECT_LT(s.maxCoeff(), 2.2);
  EXPECT_GT(s.maxCoeff(), 1.8);
}

TEST(Eigenspace, SingularValueConcentration) {
  const auto L = laplacian(sensor_graph(300, 8, 2), LaplacianVariant::normalized);
  const auto spec = dense_eigendecomposition(L);
  const ExactLowpass exact(spec);
  const Index k = 10, d = 100;
  ASSERT_TRUE(fears::testing::has_gap(spec.eigenvalues, k));
  const double cutoff = separating_cutoff(spec.eigenvalues, k);
  const double t = 3.0;
  const double half_width = std::sqrt(static_cast<double>(k) / d) + t / std::sqrt(static_cast<double>(d));
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Eigen::VectorXd s = singular_values(raw_sketch(exact, d, cutoff, seed)).head(k);
    inside += s.maxCoeff() <= 1.0 + half_width && s.minCoeff() >= 1.0 - half_width;
  }
  EXPECT_GE(inside, 196);
}

TEST(Eigenspace, RankCertainty) {
  const Index n = 400, k = 25;
  const Eigen::MatrixXd uk = random_orthonormal(n, k, 1);
  const int trials = 10000;
  int below10 = 0, below100 = 0, literal10 = 0;
  double smallest = 1.0;
  for (int t = 0; t < trials; ++t) {
    const double s = singular_values(uk.transpose() * gaussian_signals(n, k, 5000 + t)).minCoeff();
    smallest = std::min(smallest, s);
    below10 += s < 1.0 / (k * 10.0);
    below100 += s < 1.0 / (k * 100.0);
    literal10 += s < 1.0 / 10.0;
  }
  EXPECT_GT(smallest, 1e-13);
  // For a k x k matrix with variance 1/k entries the smallest singular value obeys
  // P(s_min < 1/(k beta)) < e / (beta sqrt(2 pi)).
  const double c = std::numbers::e / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_LT(below10 / static_cast<double>(trials), c / 10.0);
  EXPECT_LT(below100 / static_cast<double>(trials), c / 100.0);
  // Without the 1/k the threshold sits inside the bulk of the distribution.
  EXPECT_GT(literal10 / static_cast<double>(trials), c / 10.0);
}

TEST(Eigenspace, RankDeficientSketchThrows) {
  Eigen::MatrixXd sketch = Eigen::MatrixXd::Zero(20, 3);
  sketch.col(0).setOnes();
  sketch.col(1).setOnes();
  EXPECT_THROW(orthonormalize_sketch(sketch, 2, Orthonormalization::svd), RankDeficientSketch);
  EXPECT_THROW(orthonormalize_sketch(sketch, 4, Orthonormalization::svd), std::invalid_argument);
}

TEST(Eigenspace, MeanEnergyGrowsWithD) {
  const auto L = laplacian(sensor_graph(1000, 8, 4), LaplacianVariant::normalized);
  const auto spec = dense_eigendecomposition(L);
  const Index k = 10;
  const Eigen::MatrixXd uk = spec.leading(k);
  const ChebyshevLowpass filter(L, 150);
  const double cutoff = spec.eigenvalues[k - 1];
  double previous = 0.0;
  for (Index d : {k, 2 * k, 4 * k}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      EigenspaceOptions opts;
      opts.d = d;
      opts.seed = seed;
      opts.lambda_k = cutoff;
      mean += mean_energy(approximate_eigenspace(filter, k, opts).basis, uk) / 20.0;
    }
    EXPECT_GE(mean, previous) << "d=" << d;
    previous = mean;
  }
}

TEST(Eigenspace, CostContract) {
  const auto L = laplacian(sensor_graph(500, 7, 9), LaplacianVariant::normalized);
  for (Index d : {6, 12}) {
    EigenspaceOptions opts;
    opts.m = 120;
    opts.d = d;
    opts.seed = 2;
    const Index k = 6;
    const auto approx = approximate_eigenspace(L, k, opts);
    const auto& diag = approx.diagnostics;
    const std::uint64_t probes = static_cast<std::uint64_t>(diag.lambda_iterations);
    EXPECT_EQ(diag.filter_spmv, 120u * d);
    EXPECT_EQ(diag.probe_spmv, 120u * probes * k);
    EXPECT_EQ(diag.ops.spmv, 120u * (d + probes * k));
    EXPECT_EQ(diag.ops.svd_calls, 1u);
    EXPECT_EQ(diag.ops.svd_core_cost, static_cast<std::uint64_t>(d * d * d));
    EXPECT_EQ(diag.ops.qr_cost, static_cast<std::uint64_t>(500 * d * d));
  }
}

TEST(ProjectionStats, IdentityBasis) {
  const auto report = gaussian_projection_stats(Eigen::MatrixXd::Identity(30, 30), 10, 300, 1);
  EXPECT_DOUBLE_EQ(report.sigma2, 0.1);
  EXPECT_NEAR(report.variance.estimate, 0.1, 4.0 * report.variance.standard_error);
  EXPECT_TRUE(report.all_pass());
}

TEST(ProjectionStats, RandomBasis) {
  const auto report = gaussian_projection_stats(random_orthonormal(200, 25, 4), 25, 2000, 7);
  EXPECT_TRUE(report.mean.pass);
  EXPECT_TRUE(report.variance.pass);
  EXPECT_TRUE(report.cov_same_column.pass);
  EXPECT_TRUE(report.cov_same_row.pass);
  EXPECT_TRUE(report.cov_first_pair.pass);
  EXPECT_LT(std::abs(report.cov_first_pair.estimate), 4.0 * report.sigma2 / std::sqrt(2000.0));
}

TEST(ProjectionStats, RejectsNonOrthonormal) {
  Eigen::MatrixXd u = random_orthonormal(50, 5, 1);
  u(0, 0) += 0.1;
  EXPECT_THROW(gaussian_projection_stats(u, 5, 10, 1), std::invalid_argument);
}
