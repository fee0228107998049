#include "fears/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fears {

Damping parse_damping(std::string_view name) {
  if (name == "none") return Damping::none;
  if (name == "jackson") return Damping::jackson;
  throw std::invalid_argument("unknown damping: " + std::string(name));
}

std::string_view to_string(Damping damping) { return damping == Damping::jackson ? "jackson" : "none"; }

double PolyFilter::operator()(double lambda) const {
  const double x = map_to_unit(lambda);
  double b1 = 0.0, b2 = 0.0;
  for (int j = degree(); j >= 1; --j) {
    const double b0 = coeffs[static_cast<std::size_t>(j)] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs.empty() ? 0.0 : coeffs[0] + x * b1 - b2;
}

std::vector<double> jackson_factors(int m) {
  if (m < 0) throw std::invalid_argument("jackson order must be non-negative");
  const double alpha = std::numbers::pi / (m + 2);
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  std::vector<double> g(static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) {
    const double frac = 1.0 - static_cast<double>(j) / (m + 2);
    g[static_cast<std::size_t>(j)] =
        (frac * sa * std::cos(j * alpha) + ca * std::sin(j * alpha) / (m + 2)) / sa;
  }
  return g;
}

std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, int m, int nodes) {
  if (m < 0) throw std::invalid_argument("degree must be non-negative");
  if (nodes < m + 1) throw std::invalid_argument("quadrature needs at least m+1 nodes");
  std::vector<double> c(static_cast<std::size_t>(m + 1), 0.0);
  for (int i = 0; i < nodes; ++i) {
    const double theta = std::numbers::pi * (i + 0.5) / nodes;
    const double x = std::cos(theta);
    const double fx = f(x);
    if (fx == 0.0) continue;
    // T_j(x) by the three-term recurrence.
    double t_prev = 1.0, t_cur = x;
    c[0] += fx;
    if (m >= 1) c[1] += fx * x;
    for (int j = 2; j <= m; ++j) {
      const double t_next = 2.0 * x * t_cur - t_prev;
      c[static_cast<std::size_t>(j)] += fx * t_next;
      t_prev = t_cur;
      t_cur = t_next;
    }
  }
  for (auto& v : c) v *= 2.0 / nodes;
  c[0] *= 0.5;
  return c;
}

int default_quadrature_nodes(int m) { return 32 * (m + 1); }

PolyFilter ideal_lowpass_coeffs(double cutoff, double lambda_max, int m, Damping damping, int nodes) {
  if (m < 1) throw std::invalid_argument("filter order m must be >= 1");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be positive");
  if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be positive");
  if (cutoff >= lambda_max)
    throw std::invalid_argument("cutoff >= lambda_max: the low-pass would be the identity");
  if (nodes == 0) nodes = default_quadrature_nodes(m);
  if (nodes < 2 * (m + 1)) throw std::invalid_argument("quadrature needs at least 2(m+1) nodes");

  PolyFilter filter;
  filter.lambda_max = lambda_max;
  filter.cutoff = cutoff;
  filter.damping = damping;
  const double x_cut = (2.0 * cutoff - lambda_max) / lambda_max;
  filter.coeffs = chebyshev_coefficients([x_cut](double x) { return x <= x_cut ? 1.0 : 0.0; }, m, nodes);
  if (damping == Damping::jackson) {
    const auto g = jackson_factors(m);
    for (std::size_t j = 0; j < filter.coeffs.size(); ++j) filter.coeffs[j] *= g[j];
  }
  return filter;
}

PolyFilter constant_filter(double lambda_max, int m) {
  PolyFilter filter;
  filter.lambda_max = lambda_max;
  filter.cutoff = lambda_max;
  filter.coeffs.assign(static_cast<std::size_t>(m + 1), 0.0);
  filter.coeffs[0] = 1.0;
  return filter;
}

}  // namespace fears
