#pragma once

#include <functional>
#include <string_view>
#include <vector>

namespace fears {

enum class Damping { none, jackson };

Damping parse_damping(std::string_view name);
std::string_view to_string(Damping damping);

/**
 * Degree-m polynomial on [0, lambda_max] in the Chebyshev basis of the mapped
 * variable x = (2 lambda - lambda_max) / lambda_max.
 *
 * `coeffs` already include any damping, so p(lambda) = sum_j coeffs[j] T_j(x).
 */
struct PolyFilter {
  std::vector<double> coeffs;
  double lambda_max = 2.0;
  double cutoff = 0.0;
  Damping damping = Damping::none;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double map_to_unit(double lambda) const { return (2.0 * lambda - lambda_max) / lambda_max; }
  /// Clenshaw evaluation. Only meaningful for lambda in [0, lambda_max].
  double operator()(double lambda) const;
};

/// Order-m Jackson damping factors g_0..g_m (g_0 = 1).
std::vector<double> jackson_factors(int m);

/// Chebyshev coefficients of f on [-1, 1] by Chebyshev-Gauss quadrature with
/// `nodes` points (c_0 carries the 1/2 convention, i.e. f ~ sum c_j T_j).
std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, int m, int nodes);

/// Quadrature order used when the caller does not pick one.
int default_quadrature_nodes(int m);

/**
 * Polynomial approximation of the ideal low-pass 1[lambda <= cutoff] on
 * [0, lambda_max]. Throws std::invalid_argument unless
 * 0 < cutoff < lambda_max and m >= 1; `nodes` must be >= 2(m+1) when given.
 */
PolyFilter ideal_lowpass_coeffs(double cutoff, double lambda_max, int m, Damping damping, int nodes = 0);

/// p == 1 written as a degree-m expansion (coeffs = [1, 0, ..., 0]).
PolyFilter constant_filter(double lambda_max, int m);

}  // namespace fears
