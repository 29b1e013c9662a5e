#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "tubular/geometry.hpp"

namespace tubular::framing {

using geom::AmbientSpace;
using geom::CurveGeometry;
using geom::EmbeddingGeometry;
using geom::EmbeddingPatch;
using geom::Mat;
using geom::Vec;
using geom::Vector3d;

// Orientation of the transverse potential along a curve: an orthonormal pair
// of normal vectors per sample (codimension 2 in R^3).
struct CurveFrame {
  std::vector<std::array<Vector3d, 2>> e;
  bool closed = false;
  double spacing = 0;
};

// theta measures the frame rotation relative to the curve normal: E1 =
// cos(theta) n + sin(theta) b, E2 = -sin(theta) n + cos(theta) b.
CurveFrame frenet_aligned_frame(const CurveGeometry& curve);
CurveFrame constant_rate_frame(const CurveGeometry& curve, double omega0, double theta0 = 0);
CurveFrame rotation_profile_frame(const CurveGeometry& curve,
                                  const std::function<double(double)>& theta);
// Sparse frame table interpolated onto the curve grid (rotation slerp, then
// re-projected into each normal plane).
CurveFrame frame_from_table(const CurveGeometry& curve, const std::vector<double>& alpha,
                            const std::vector<std::array<Vector3d, 2>>& frames);

// S per sample for a curve frame: the (1,2) component of the antisymmetrized
// twist, S = <E1, dE2/dalpha>. raw_residual (optional out) reports the worst
// antisymmetry violation before antisymmetrization; above 1e-4 the sampling is
// declared too coarse.
std::vector<double> potential_twist(const CurveGeometry& curve, const CurveFrame& frame,
                                    double* raw_residual = nullptr);

struct TwistSample {
  double tau = 0;
  double omega = 0;
  double S = 0;
};

// Splits the twist of a d=2 frame into torsion and frame-rotation rate;
// -S = tau + omega pointwise. Requires the curve normal everywhere.
std::vector<TwistSample> curve_twist_decomposition(const CurveGeometry& curve,
                                                   const CurveFrame& frame);

// Normal frame field over the parameter domain of a patch.
using FrameField = std::function<std::vector<Vec>(const Vec&)>;

// S_{mu nu} for tangent direction i of a framed embedded manifold,
// antisymmetrized, with the same coarseness guard as the curve version.
Mat potential_twist_surface(const AmbientSpace& space, const EmbeddingPatch& patch,
                            const FrameField& field, const Vec& params, int direction,
                            double* raw_residual = nullptr);

// Curvature of the normal connection, one d x d antisymmetric matrix per
// tangent pair (i, j), i < j, from the curvature/second-fundamental-form data.
std::vector<Mat> normal_curvature(const EmbeddingGeometry& geom);

// Residual of the structure identity tying the exterior derivative of the
// twist one-form to curvature and second-fundamental-form commutators,
// evaluated on the coordinate tangent pair of a 2-parameter patch. Refines
// the step internally and objects if the residual fails to shrink.
Mat ds_identity_residual(const AmbientSpace& space, const EmbeddingPatch& patch,
                         const FrameField& field, const Vec& params, double h = 2e-3);

}  // namespace tubular::framing
