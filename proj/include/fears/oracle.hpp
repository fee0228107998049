#pragma once

#include "fears/laplacian.hpp"

namespace fears {

/// Full ascending eigendecomposition L = U diag(eigenvalues) U^T.
struct ExactSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double lambda_max_bound = 0.0;  // copied from the operator

  Index size() const { return eigenvalues.size(); }
  Eigen::MatrixXd leading(Index k) const { return eigenvectors.leftCols(k); }
};

/// Largest N the dense routines accept: FEARS_ORACLE_CAP if set, else 2000.
Index oracle_cap();

/// Absolute slack used when comparing computed eigenvalues to a threshold.
double eigenvalue_tolerance(double lambda_max);

/// Dense symmetric eigensolver. Each eigenvector is signed so that its first
/// component with |u_i| > 1e-12 is positive.
ExactSpectrum dense_eigendecomposition(const LaplacianOperator& L);

/// |{i : lambda_i <= lambda}|, inclusive up to eigenvalue_tolerance.
Index true_count(const ExactSpectrum& spectrum, double lambda);
Index true_count(const Eigen::VectorXd& ascending_eigenvalues, double lambda, double lambda_max);

/// Cutoff isolating exactly the k smallest eigenvalues: midway between the
/// k-th and (k+1)-th smallest (or the top eigenvalue when k == N).
double separating_cutoff(const Eigen::VectorXd& ascending_eigenvalues, Index k);

/// Smallest `count` eigenpairs of a large sparse Laplacian through ARPACK
/// (Lanczos on lambda_max_bound * I - L). A verification reference for graphs
/// beyond the dense cap; same sign convention as the dense oracle.
struct PartialSpectrum {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // N x count
};
PartialSpectrum reference_low_spectrum(const LaplacianOperator& L, Index count, double tol = 1e-12);

void fix_signs(Eigen::MatrixXd& vectors);

}  // namespace fears
