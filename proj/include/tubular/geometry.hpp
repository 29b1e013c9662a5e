#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "tubular/tensors.hpp"

namespace tubular::geom {

using Eigen::Vector2d;
using Eigen::Vector3d;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Below this curvature the principal normal is ill-conditioned and frames fall
// back to parallel transport.
constexpr double kappa_min = 1e-8;

// ---------------------------------------------------------------------------
// Ambient space
// ---------------------------------------------------------------------------

struct AmbientSpace {
  int dim = 3;
  // x -> symmetric positive-definite dim x dim matrix; empty means flat
  // Euclidean (identity metric).
  std::function<Mat(const Vec&)> metric;
  double fd_step = 1e-4;

  bool flat() const { return !metric; }
  Mat metric_at(const Vec& x) const;
  Mat metric_inverse_at(const Vec& x) const;  // throws SingularMetric
  // (a, b, c) -> Gamma^a_{bc}, from central differences of the metric.
  Tensor3 christoffel(const Vec& x) const;
};

// Lowered coordinate components R_{abcd} = <e_a, R(e_c, e_d) e_b>.
Tensor4 ambient_riemann(const AmbientSpace& space, const Vec& x);

// Riemann components in an orthonormal frame, antisymmetrized in both index
// pairs so exact cancellations survive finite-difference noise.
Tensor4 frame_riemann(const AmbientSpace& space, const Vec& x, const std::vector<Vec>& frame);

// Full contraction g^{ac} g^{bd} R_{abcd}; positive 2/a^2 for the round sphere.
double scalar_curvature(const AmbientSpace& space, const Vec& x);

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

struct FrenetData {
  Vector3d t, n, b;
  double kappa = 0;
  double tau = 0;
  bool tau_defined = false;
};

// Frame of an arclength-parameterized curve at alpha via central differences
// (4th order). kappa = |dt/dalpha|, tau from db/dalpha = -tau n. Below
// kappa_min the normal is continued by parallel transport of prior_normal;
// without a prior normal this raises DegenerateFrame.
FrenetData frenet_data(const std::function<Vector3d(double)>& curve_map, double alpha, double h,
                       const std::optional<Vector3d>& prior_normal = std::nullopt);

struct CurveSample {
  double alpha = 0;
  Vector3d x, t, n, b;
  double kappa = 0;
  double tau = 0;
  bool tau_defined = false;
};

struct CurveGeometry {
  std::vector<CurveSample> samples;
  bool closed = false;
  double length = 0;

  double spacing() const;
};

// Resamples an arbitrary-parameter curve at n equal-arclength points. Length
// by adaptive quadrature of the speed; frames from generic-parameter
// derivative formulas with Bishop fallback on straight stretches.
CurveGeometry arclength_reparameterize(const std::function<Vector3d(double)>& curve_map, double s0,
                                       double s1, int n, bool closed = false);

// Curve from a dense sample table (columns alpha, x, y, z); frames recomputed
// by on-grid differences.
CurveGeometry curve_from_samples(const std::vector<double>& alpha,
                                 const std::vector<Vector3d>& x, bool closed);

// Named 3D families (maps handed to arclength_reparameterize).
struct CurveFamily {
  std::function<Vector3d(double)> map;
  double s0 = 0, s1 = 1;
  bool closed = false;
};
CurveFamily circle3(double rho);
CurveFamily helix3(double a, double b);            // (a cos s/c, a sin s/c, b s/c), c = hypot(a,b)
CurveFamily line3(double length);
CurveFamily ellipse3(double a, double b);

// Planar curve with signed curvature, arclength-parameterized; the input the
// strip solver needs. Positive kappa bends toward the left normal (-t_y, t_x).
struct PlanarCurve {
  std::function<Vector2d(double)> x;
  std::function<Vector2d(double)> tangent;
  std::function<double(double)> kappa;
  // Interval averages of kappa and kappa^2 over [a, b]. Optional; when set
  // they let grid assembly stay second order across curvature jumps.
  std::function<double(double, double)> mean_kappa;
  std::function<double(double, double)> mean_kappa_sq;
  double length = 0;
  bool closed = false;
};
PlanarCurve planar_segment(double length);
PlanarCurve planar_circle(double rho);
// Straight lead, circular arc (radius rho, given angle), straight lead.
PlanarCurve planar_arc_line(double rho, double angle, double lead);

// ---------------------------------------------------------------------------
// Embedded submanifolds
// ---------------------------------------------------------------------------

struct EmbeddingPatch {
  int m = 2;  // parameter dimension
  int N = 3;  // ambient dimension
  std::function<Vec(const Vec&)> embed;
  double fd_step = 6e-4;
};

EmbeddingPatch plane_patch();
EmbeddingPatch cylinder_patch(double rho);          // params (axial z, angle phi)
EmbeddingPatch sphere_patch(double rho);            // params (theta, phi)
EmbeddingPatch torus_patch(double R, double r);     // params (u, v), v=0 outer equator
EmbeddingPatch graph_patch(const std::function<double(double, double)>& f);          // z = f(x, y)
EmbeddingPatch graph4_patch(const std::function<double(double, double)>& f,
                            const std::function<double(double, double)>& g);         // R^4 graph
EmbeddingPatch flat_torus4_patch(double R1, double R2);  // arclength params, flat R^4
EmbeddingPatch identity_patch(int n);  // m = N, no normal directions

struct CurvatureScalars {
  double Tsq = 0;     // squared norm of the second fundamental form (x1/2 convention)
  double Msq = 0;     // squared mean curvature vector
  double R_full = 0;  // ambient scalar curvature contraction over the combined frame
  double R_perp = 0;  // normal-normal block contraction
  double R_par = 0;   // tangent-tangent block contraction
  double R_hat = 0;   // intrinsic scalar curvature, via the Gauss equation
};

struct EmbeddingGeometry {
  int m = 0, d = 0;
  Vec params;
  Vec q;                          // ambient point
  std::vector<Vec> tangent_frame; // m vectors, ambient coordinates
  std::vector<Vec> normal_frame;  // d vectors
  Tensor3 T;                      // (mu, i, j), symmetric in (i, j)
  Tensor4 R;                      // frame components; index order: d normals then m tangents
};

// Deterministic orthonormal frames at params: tangents from Gram-Schmidt on
// the jacobian columns in order, normals by completing with coordinate axes.
void build_frames(const AmbientSpace& space, const EmbeddingPatch& patch, const Vec& params,
                  std::vector<Vec>& tangent, std::vector<Vec>& normal);

// Jacobian of the embedding map (N x m), central differences.
Mat patch_jacobian(const EmbeddingPatch& patch, const Vec& params);

// Parameter velocities realizing the tangent frame: frame vector i equals
// patch_jacobian * column i.
Mat tangent_frame_coefficients(const AmbientSpace& space, const EmbeddingPatch& patch,
                               const Vec& params);

// T(mu, i, j) = <E_mu, covariant derivative of E_j along E_i>, symmetrized;
// frames validated for orthonormality (FrameMismatch otherwise).
Tensor3 second_fundamental_form(const AmbientSpace& space, const EmbeddingPatch& patch,
                                const std::vector<Vec>& tangent, const std::vector<Vec>& normal,
                                const Vec& params);

EmbeddingGeometry embed_geometry(const AmbientSpace& space, const EmbeddingPatch& patch,
                                 const Vec& params);

CurvatureScalars curvature_scalars(const EmbeddingGeometry& geom);

// Scalars of a curve point in flat space: Tsq = Msq = kappa^2, rest zero.
CurvatureScalars curve_scalars(double kappa);

// The m-dimensional space with metric J^T g J pulled back through the patch;
// its scalar curvature is an intrinsic-route check value for R_hat.
AmbientSpace induced_metric_space(const AmbientSpace& space, const EmbeddingPatch& patch);

}  // namespace tubular::geom
