#include "fears/oracle.hpp"

#include <arpack/arpack.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fears {

Index oracle_cap() {
  if (const char* env = std::getenv("FEARS_ORACLE_CAP")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<Index>(v);
  }
  return 2000;
}

double eigenvalue_tolerance(double lambda_max) { return 1e-10 * std::max(1.0, lambda_max); }

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    for (Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > 1e-12) {
        if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
}

ExactSpectrum dense_eigendecomposition(const LaplacianOperator& L) {
  const Index n = L.size();
  if (n > oracle_cap())
    throw std::invalid_argument("dense oracle refuses N = " + std::to_string(n) + " above cap " +
                                std::to_string(oracle_cap()) + " (set FEARS_ORACLE_CAP to override)");
  const Eigen::MatrixXd dense = Eigen::MatrixXd(L.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigensolver did not converge");

  ExactSpectrum spectrum;
  spectrum.eigenvalues = solver.eigenvalues();
  spectrum.eigenvectors = solver.eigenvectors();
  spectrum.lambda_max_bound = std::max(L.lambda_max_bound, spectrum.eigenvalues.maxCoeff());
  fix_signs(spectrum.eigenvectors);
  return spectrum;
}

Index true_count(const Eigen::VectorXd& ascending_eigenvalues, double lambda, double lambda_max) {
  const double limit = lambda + eigenvalue_tolerance(lambda_max);
  return static_cast<Index>(std::count_if(ascending_eigenvalues.begin(), ascending_eigenvalues.end(),
                                          [limit](double v) { return v <= limit; }));
}

Index true_count(const ExactSpectrum& spectrum, double lambda) {
  return true_count(spectrum.eigenvalues, lambda, spectrum.lambda_max_bound);
}

double separating_cutoff(const Eigen::VectorXd& ascending_eigenvalues, Index k) {
  const Index n = ascending_eigenvalues.size();
  if (k < 1 || k > n) throw std::invalid_argument("separating_cutoff needs 1 <= k <= N");
  if (k == n) return ascending_eigenvalues[n - 1];
  return 0.5 * (ascending_eigenvalues[k - 1] + ascending_eigenvalues[k]);
}

PartialSpectrum reference_low_spectrum(const LaplacianOperator& L, Index count, double tol) {
  const Index n = L.size();
  if (count < 1 || count >= n) throw std::invalid_argument("reference_low_spectrum needs 1 <= count < N");

  // Lanczos on shift * I - L: its largest eigenpairs are L's smallest.
  const double shift = L.lambda_max_bound;
  const a_int n_a = static_cast<a_int>(n);
  const a_int nev = static_cast<a_int>(count);
  const a_int ncv = static_cast<a_int>(std::min<Index>(n, std::max<Index>(2 * count + 1, count + 64)));
  const a_int ldv = n_a;
  const a_int lworkl = ncv * (ncv + 8);

  std::vector<double> resid(static_cast<std::size_t>(n), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(ncv));
  std::vector<double> workd(3 * static_cast<std::size_t>(n));
  std::vector<double> workl(static_cast<std::size_t>(lworkl));
  a_int iparam[11] = {};
  a_int ipntr[14] = {};
  iparam[0] = 1;        // exact shifts
  iparam[2] = 100000;   // max restarts
  iparam[6] = 1;        // regular mode
  a_int ido = 0;
  a_int info = 0;

  // Deterministic start vector instead of ARPACK's internal random one.
  for (Index i = 0; i < n; ++i) resid[static_cast<std::size_t>(i)] = std::cos(0.7 * static_cast<double>(i) + 0.3);
  info = 1;

  while (true) {
    dsaupd_c(&ido, "I", n_a, "LA", nev, tol, resid.data(), ncv, v.data(), ldv, iparam, ipntr, workd.data(),
             workl.data(), lworkl, &info);
    if (ido == -1 || ido == 1) {
      Eigen::Map<const Eigen::VectorXd> in(workd.data() + ipntr[0] - 1, n);
      Eigen::Map<Eigen::VectorXd> out(workd.data() + ipntr[1] - 1, n);
      out.noalias() = L.matrix * in;
      out = shift * in - out;
    } else {
      break;
    }
  }
  if (info < 0) throw std::runtime_error("ARPACK dsaupd failed with info " + std::to_string(info));
  if (iparam[4] < nev)
    throw std::runtime_error("ARPACK converged only " + std::to_string(iparam[4]) + " of " +
                             std::to_string(nev) + " eigenpairs");

  std::vector<a_int> select(static_cast<std::size_t>(ncv), 1);
  std::vector<double> d(static_cast<std::size_t>(nev));
  Eigen::MatrixXd z(n, nev);
  a_int ierr = 0;
  dseupd_c(1, "A", select.data(), d.data(), z.data(), ldv, 0.0, "I", n_a, "LA", nev, tol, resid.data(), ncv,
           v.data(), ldv, iparam, ipntr, workd.data(), workl.data(), lworkl, &ierr);
  if (ierr != 0) throw std::runtime_error("ARPACK dseupd failed with info " + std::to_string(ierr));

  std::vector<Index> order(static_cast<std::size_t>(nev));
  std::iota(order.begin(), order.end(), 0);
  // Ascending in L means descending in shift - L.
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return d[a] > d[b]; });

  PartialSpectrum out;
  out.eigenvalues.resize(nev);
  out.eigenvectors.resize(n, nev);
  for (Index j = 0; j < nev; ++j) {
    out.eigenvalues[j] = shift - d[static_cast<std::size_t>(order[j])];
    out.eigenvectors.col(j) = z.col(order[j]).normalized();
  }
  fix_signs(out.eigenvectors);
  return out;
}

}  // namespace fears
