#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace tubular {

// 4th-order central first derivative of a scalar or vector-valued function.
// The result is materialized so Eigen expressions cannot dangle.
template <typename F>
auto deriv1_c4(const F& f, double x, double h) {
  using R = std::decay_t<decltype(f(x))>;
  R out = (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
  return out;
}

// 4th-order central second derivative.
template <typename F>
auto deriv2_c4(const F& f, double x, double h) {
  using R = std::decay_t<decltype(f(x))>;
  R out = (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) /
          (12.0 * h * h);
  return out;
}

// Adaptive Simpson quadrature with absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 40);

// Least-squares line y = a + b x; returns (a, b).
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log|y| against log x (convergence-order estimate).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Edit distance, used for strict-schema key suggestions.
int levenshtein(const std::string& a, const std::string& b);

// Antisymmetric Fourier differentiation matrix for n equispaced points on a
// period-2*pi grid (n even).
Eigen::MatrixXd fourier_diff_matrix(int n);

// Finite-difference weights (Fornberg) for the m-th derivative at z from the
// sample locations xs; exact for polynomials up to degree xs.size()-1.
std::vector<double> fd_weights(double z, const std::vector<double>& xs, int m);

// 4th-order central-difference coefficients on the stencil {-2,-1,0,1,2} for
// the first derivative, divided by h.
inline void stencil_d1_c4(double h, double c[5]) {
  c[0] = 1.0 / (12 * h);
  c[1] = -8.0 / (12 * h);
  c[2] = 0.0;
  c[3] = 8.0 / (12 * h);
  c[4] = -1.0 / (12 * h);
}

}  // namespace tubular
