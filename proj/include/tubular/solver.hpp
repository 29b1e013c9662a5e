#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tubular/effective.hpp"
#include "tubular/eigensolve.hpp"
#include "tubular/geometry.hpp"
#include "tubular/transverse.hpp"

namespace tubular::solver {

using effective::EffectiveField;

// Hermitian matrix over the (grid point) x (mode) basis.
struct DiscretizedOperator {
  int dim = 0;
  int k = 1;
  int n_points = 0;
  bool periodic = true;
  double h = 0.0;  // grid step (first direction)
  Eigen::SparseMatrix<std::complex<double>> H;
  std::string basis;
  double sigma_hint = 0.0;  // shift below the lowest eigenvalue, for iterative solves
};

// Covariant finite-difference operator for the assembled field. The kinetic
// part is a sum of squared forward differences with unitary transport links,
// which keeps the matrix exactly Hermitian; n_grid must match the field grid.
DiscretizedOperator discretize_tangential(const EffectiveField& field, int n_grid, bool periodic);

// Dense below the dimension threshold, shift-invert iteration above it.
Spectrum eigensolve_operator(const DiscretizedOperator& op, int k_eigs, bool want_vectors = true,
                             unsigned seed = kDefaultSeed);

// Full 2D hard-wall strip problem in curve-adapted coordinates (alpha, u)
// with the exact area weight 1 - kappa(alpha) u.
struct StripGrid {
  int n_alpha = 400;
  int n_u = 40;
  bool check_resolution = true;
};
struct StripResult {
  double E_full = 0.0;           // lowest strip eigenvalue
  double E_perp_discrete = 0.0;  // flat transverse box on the same stencil
  double E_perp_analytic = 0.0;
  Spectrum spectrum;
};
StripResult strip_oracle(const geom::PlanarCurve& curve, double epsilon, const StripGrid& grid,
                         int k_eigs = 1, double hbar = 1.0);

// Full twisted-tube problem over plane-wave x oscillator blocks in the
// co-rotating frame.
struct TwistedTubeResult {
  Spectrum spectrum;
  double E_perp = 0.0;
  int blocks_used = 0;
};
TwistedTubeResult twisted_tube_oracle(double S0, const transverse::TransversePotential& pot,
                                      double length, int n_basis, int k_eigs);

// Width-limit study: one row per epsilon, error against the width-independent
// model value.
struct ConvergenceRow {
  double epsilon = 0, E_full = 0, E_perp = 0, E_residual = 0, E_effective = 0, abs_error = 0;
};
struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double fitted_order = 0.0;  // +inf when every deviation is at solver precision
};
ConvergenceReport epsilon_convergence(
    const std::function<std::pair<double, double>(double)>& oracle,
    const std::vector<double>& eps_list, double e_effective);

// Spectral agreement between the curved-measure 1D kinetic operator and its
// flat-measure rescaling with the induced scalar potential (periodic interval).
double vielbein_kinetic_check(const std::function<double(double)>& metric, int n, int k_eigs = 16,
                              double hbar = 1.0);

// Spectra of a rotation-invariant tube under a still frame and under a frame
// rotating by theta(alpha); returns the largest eigenvalue difference.
double frame_independence_residual(const transverse::ModeSet& modes, double length,
                                   const std::function<double(double)>& theta, int n_grid,
                                   int k_eigs);

}  // namespace tubular::solver
