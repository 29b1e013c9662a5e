#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "tubular/geometry.hpp"
#include "tubular/tensors.hpp"
#include "tubular/transverse.hpp"

namespace tubular::effective {

using geom::CurvatureScalars;
using transverse::ModeSet;

// Pointwise blocks of the curvature-induced potential on the mode cluster.
struct PotentialBreakdown {
  double curvature_well = 0.0;     // bending attraction, multiple of identity
  double ambient_curvature = 0.0;  // enclosing-space curvature shift, multiple of identity
  Eigen::MatrixXcd twist_variance;      // k x k
  Eigen::MatrixXcd curvature_coupling;  // k x k, ambient curvature against angular momentum
  Eigen::MatrixXcd total;               // k x k, Hermitian
  double herm_residual = 0.0;           // measured before symmetrization
};

// Geometric data of one grid point feeding the assembly.
struct GeometrySample {
  CurvatureScalars scalars;
  Tensor3 twist;           // S(mu, nu, i), antisymmetric in the first two slots
  Tensor4 normal_riemann;  // ambient curvature restricted to normal frame indices
};

// Assembled k-component field over the submanifold grid.
struct EffectiveField {
  int m = 1;
  int d = 0;
  int k = 1;
  double hbar = 1.0;
  bool periodic = true;
  std::vector<double> alpha;  // m=1 arclength grid
  double length = 0.0;        // period (periodic) or span (open)
  int nu = 0, nv = 0;         // m=2 rectangle
  double hu = 0.0, hv = 0.0;
  std::vector<Eigen::MatrixXcd> gauge;  // point-major, one k x k Hermitian block per direction
  std::vector<PotentialBreakdown> well;
  std::vector<double> extra_shift;  // slowly varying scalar addition, empty = none

  // Optional exact integral of the gauge block over a grid segment [a, b].
  // When set, the discretization builds its transport links from it instead of
  // midpoint sampling.
  std::function<Eigen::MatrixXcd(double, double)> gauge_link;

  const Eigen::MatrixXcd& gauge_at(int p, int i) const {
    return gauge[static_cast<size_t>(p) * m + i];
  }
  int points() const { return m == 1 ? static_cast<int>(alpha.size()) : nu * nv; }
};

// Scalar well depth from the curvature invariants. Three algebraically
// equivalent forms are evaluated and must agree.
double geometric_potential_scalar(const CurvatureScalars& s, double hbar);

// Largest pairwise disagreement between those forms, for diagnostics.
double form_spread(const CurvatureScalars& s, double hbar);

// Full k x k potential block at one point.
PotentialBreakdown geometric_potential(const GeometrySample& g, const ModeSet& modes);

// Gauge block A_i = S contracted against the angular momentum matrices.
Eigen::MatrixXcd gauge_block(const Tensor3& twist, const ModeSet& modes, int direction);

// Assembly over an arclength grid (m=1) or an orthonormal rectangle (m=2).
EffectiveField assemble_field(const std::vector<GeometrySample>& samples, const ModeSet& modes,
                              const std::vector<double>& alpha, bool periodic, double length);
EffectiveField assemble_field_rect(const std::vector<GeometrySample>& samples, const ModeSet& modes,
                                   int nu, int nv, double hu, double hv, bool periodic);

// Copy of the field with the scalar shift profile filled in (m=1 grids).
EffectiveField with_potential_shift(const EffectiveField& field,
                                    const std::function<double(double)>& shift);

// Helpers for two normal directions, where S_{mu nu i} = s_i eps_{mu nu} and
// Lambda_{mu nu} = lam eps_{mu nu}.
double twist_component(const Tensor3& twist, int direction);
Eigen::MatrixXcd lambda_component(const ModeSet& modes);

// Samples for a framed curve in flat space: bending plus frame twist rate.
std::vector<GeometrySample> curve_samples(const std::vector<double>& kappa,
                                          const std::vector<double>& twist_rate);

// Restriction of a combined-frame curvature tensor to the first d (normal) indices.
Tensor4 normal_block(const Tensor4& combined, int d);

}  // namespace tubular::effective
