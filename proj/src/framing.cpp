#include "tubular/framing.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "tubular/errors.hpp"
#include "tubular/numerics.hpp"
#include "tubular/tensors.hpp"

namespace tubular::framing {

namespace {

void validate_curve_frame(const CurveGeometry& curve, const CurveFrame& frame) {
  if (frame.e.size() != curve.samples.size())
    throw FrameMismatch("frame sample count differs from the curve");
  for (size_t k = 0; k < frame.e.size(); ++k) {
    const Vector3d& e1 = frame.e[k][0];
    const Vector3d& e2 = frame.e[k][1];
    const Vector3d& t = curve.samples[k].t;
    bool ok = std::abs(e1.norm() - 1) < 1e-10 && std::abs(e2.norm() - 1) < 1e-10 &&
              std::abs(e1.dot(e2)) < 1e-10 && std::abs(e1.dot(t)) < 1e-10 &&
              std::abs(e2.dot(t)) < 1e-10;
    if (!ok)
      throw FrameMismatch("frame not orthonormal to the curve at sample " + std::to_string(k));
  }
}

// 4th-order derivative of a per-sample field, wrapped for closed curves and
// shifted at open ends.
std::vector<Vector3d> grid_derivative(const std::vector<Vector3d>& f, double h, bool closed) {
  const int n = static_cast<int>(f.size());
  std::vector<Vector3d> out(n);
  if (closed) {
    for (int k = 0; k < n; ++k) {
      auto at = [&](int j) { return f[((j % n) + n) % n]; };
      out[k] = (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * h);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      int lo = std::max(0, std::min(k - 2, n - 5));
      std::vector<double> pos(5);
      for (int j = 0; j < 5; ++j) pos[j] = (lo + j - k) * h;
      std::vector<double> w = fd_weights(0.0, pos, 1);
      Vector3d acc = Vector3d::Zero();
      for (int j = 0; j < 5; ++j) acc += w[j] * f[lo + j];
      out[k] = acc;
    }
  }
  return out;
}

std::vector<double> scalar_grid_derivative(const std::vector<double>& f, double h, bool closed,
                                           double wrap_offset) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(n);
  if (closed) {
    auto at = [&](int j) {
      if (j < 0) return f[j + n] - wrap_offset;
      if (j >= n) return f[j - n] + wrap_offset;
      return f[j];
    };
    for (int k = 0; k < n; ++k)
      out[k] = (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * h);
  } else {
    for (int k = 0; k < n; ++k) {
      int lo = std::max(0, std::min(k - 2, n - 5));
      std::vector<double> pos(5);
      for (int j = 0; j < 5; ++j) pos[j] = (lo + j - k) * h;
      std::vector<double> w = fd_weights(0.0, pos, 1);
      double acc = 0;
      for (int j = 0; j < 5; ++j) acc += w[j] * f[lo + j];
      out[k] = acc;
    }
  }
  return out;
}

}  // namespace

CurveFrame frenet_aligned_frame(const CurveGeometry& curve) {
  return rotation_profile_frame(curve, [](double) { return 0.0; });
}

CurveFrame constant_rate_frame(const CurveGeometry& curve, double omega0, double theta0) {
  return rotation_profile_frame(curve,
                                [omega0, theta0](double a) { return omega0 * a + theta0; });
}

CurveFrame rotation_profile_frame(const CurveGeometry& curve,
                                  const std::function<double(double)>& theta) {
  CurveFrame fr;
  fr.closed = curve.closed;
  fr.spacing = curve.spacing();
  fr.e.reserve(curve.samples.size());
  for (const auto& s : curve.samples) {
    double th = theta(s.alpha);
    Vector3d e1 = std::cos(th) * s.n + std::sin(th) * s.b;
    Vector3d e2 = -std::sin(th) * s.n + std::cos(th) * s.b;
    fr.e.push_back({e1, e2});
  }
  return fr;
}

CurveFrame frame_from_table(const CurveGeometry& curve, const std::vector<double>& alpha,
                            const std::vector<std::array<Vector3d, 2>>& frames) {
  const size_t nt = alpha.size();
  if (frames.size() != nt || nt < 2) throw Error("frame table needs at least two entries");
  for (size_t k = 0; k + 1 < nt; ++k)
    if (!(alpha[k + 1] > alpha[k])) throw Error("frame table alphas must increase");
  std::vector<Eigen::Quaterniond> q(nt);
  for (size_t k = 0; k < nt; ++k) {
    const Vector3d& e1 = frames[k][0];
    const Vector3d& e2 = frames[k][1];
    if (std::abs(e1.norm() - 1) > 1e-8 || std::abs(e2.norm() - 1) > 1e-8 ||
        std::abs(e1.dot(e2)) > 1e-8)
      throw FrameMismatch("frame table entry not orthonormal at index " + std::to_string(k));
    Eigen::Matrix3d R;
    R.col(0) = e1;
    R.col(1) = e2;
    R.col(2) = e1.cross(e2);
    q[k] = Eigen::Quaterniond(R);
  }

  CurveFrame fr;
  fr.closed = curve.closed;
  fr.spacing = curve.spacing();
  for (const auto& s : curve.samples) {
    size_t hi = 1;
    while (hi + 1 < nt && alpha[hi] < s.alpha) ++hi;
    double t = (s.alpha - alpha[hi - 1]) / (alpha[hi] - alpha[hi - 1]);
    t = std::clamp(t, 0.0, 1.0);
    Eigen::Matrix3d R = q[hi - 1].slerp(t, q[hi]).toRotationMatrix();
    Vector3d u1 = R.col(0) - R.col(0).dot(s.t) * s.t;
    if (u1.norm() < 1e-8) throw FrameMismatch("interpolated frame collapsed onto the tangent");
    u1.normalize();
    Vector3d u2 = R.col(1) - R.col(1).dot(s.t) * s.t - R.col(1).dot(u1) * u1;
    if (u2.norm() < 1e-8) throw FrameMismatch("interpolated frame collapsed onto the tangent");
    u2.normalize();
    fr.e.push_back({u1, u2});
  }
  return fr;
}

std::vector<double> potential_twist(const CurveGeometry& curve, const CurveFrame& frame,
                                    double* raw_residual) {
  validate_curve_frame(curve, frame);
  const int n = static_cast<int>(frame.e.size());
  const double h = curve.spacing();
  std::vector<Vector3d> e1(n), e2(n);
  for (int k = 0; k < n; ++k) {
    e1[k] = frame.e[k][0];
    e2[k] = frame.e[k][1];
  }
  std::vector<Vector3d> d1 = grid_derivative(e1, h, curve.closed);
  std::vector<Vector3d> d2 = grid_derivative(e2, h, curve.closed);

  double residual = 0;
  std::vector<double> S(n);
  for (int k = 0; k < n; ++k) {
    double raw12 = e1[k].dot(d2[k]);
    double raw21 = e2[k].dot(d1[k]);
    residual = std::max({residual, 0.5 * std::abs(raw12 + raw21), std::abs(e1[k].dot(d1[k])),
                         std::abs(e2[k].dot(d2[k]))});
    S[k] = 0.5 * (raw12 - raw21);
  }
  if (raw_residual) *raw_residual = residual;
  if (residual > 1e-4)
    throw GridTooCoarse("twist antisymmetry residual " + std::to_string(residual) +
                        " exceeds 1e-4; refine the curve sampling");
  return S;
}

std::vector<TwistSample> curve_twist_decomposition(const CurveGeometry& curve,
                                                   const CurveFrame& frame) {
  validate_curve_frame(curve, frame);
  const int n = static_cast<int>(curve.samples.size());
  for (const auto& s : curve.samples)
    if (s.kappa < geom::kappa_min || !s.tau_defined)
      throw DegenerateFrame("curve normal undefined near alpha=" + std::to_string(s.alpha));

  std::vector<double> theta(n);
  for (int k = 0; k < n; ++k) {
    const auto& s = curve.samples[k];
    double c = s.n.dot(frame.e[k][0]);
    double sn = -s.n.dot(frame.e[k][1]);
    theta[k] = std::atan2(sn, c);
    if (k > 0) theta[k] += 2 * M_PI * std::round((theta[k - 1] - theta[k]) / (2 * M_PI));
  }
  double wrap = 0;
  if (curve.closed) wrap = 2 * M_PI * std::round((theta[n - 1] - theta[0]) / (2 * M_PI));

  std::vector<double> omega =
      scalar_grid_derivative(theta, curve.spacing(), curve.closed, wrap);
  std::vector<double> S = potential_twist(curve, frame);

  std::vector<TwistSample> out(n);
  for (int k = 0; k < n; ++k) {
    out[k].tau = curve.samples[k].tau;
    out[k].omega = omega[k];
    out[k].S = S[k];
  }
  return out;
}

Mat potential_twist_surface(const AmbientSpace& space, const EmbeddingPatch& patch,
                            const FrameField& field, const Vec& params, int direction,
                            double* raw_residual) {
  const int m = patch.m, N = patch.N, d = N - m;
  if (direction < 0 || direction >= m) throw Error("tangent direction out of range");
  std::vector<Vec> tangent, normal_gs;
  geom::build_frames(space, patch, params, tangent, normal_gs);
  Mat coeff = geom::tangent_frame_coefficients(space, patch, params);
  Vec x = patch.embed(params);
  Mat g = space.metric_at(x);

  std::vector<Vec> E = field(params);
  if (static_cast<int>(E.size()) != d) throw FrameMismatch("frame field has wrong codimension");
  for (int u = 0; u < d; ++u) {
    for (int v = u; v < d; ++v)
      if (std::abs((E[u].transpose() * g * E[v])(0) - (u == v ? 1.0 : 0.0)) > 1e-8)
        throw FrameMismatch("frame field not orthonormal");
    for (int i = 0; i < m; ++i)
      if (std::abs((E[u].transpose() * g * tangent[i])(0)) > 1e-8)
        throw FrameMismatch("frame field not normal to the manifold");
  }

  const bool curved = !space.flat();
  Tensor3 Gamma = curved ? space.christoffel(x) : Tensor3();
  Vec ci = coeff.col(direction);
  const double hs = 3e-3;

  Mat Sraw(d, d);
  for (int nu = 0; nu < d; ++nu) {
    auto fv = [&](double s) { return field((params + s * ci).eval())[nu]; };
    Vec D = deriv1_c4(fv, 0.0, hs);
    if (curved)
      for (int a = 0; a < N; ++a) {
        double corr = 0;
        for (int b = 0; b < N; ++b)
          for (int c = 0; c < N; ++c) corr += Gamma(a, b, c) * tangent[direction](b) * E[nu](c);
        D(a) += corr;
      }
    for (int mu = 0; mu < d; ++mu) Sraw(mu, nu) = (E[mu].transpose() * g * D)(0);
  }

  double residual = 0;
  for (int u = 0; u < d; ++u)
    for (int v = u; v < d; ++v) residual = std::max(residual, 0.5 * std::abs(Sraw(u, v) + Sraw(v, u)));
  if (raw_residual) *raw_residual = residual;
  if (residual > 1e-4)
    throw GridTooCoarse("twist antisymmetry residual " + std::to_string(residual) +
                        " exceeds 1e-4");
  return 0.5 * (Sraw - Sraw.transpose());
}

std::vector<Mat> normal_curvature(const EmbeddingGeometry& geom) {
  const int m = geom.m, d = geom.d;
  std::vector<Mat> out;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Mat B = Mat::Zero(d, d);
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
          double s = geom.R(mu, nu, d + i, d + j);
          for (int k = 0; k < m; ++k)
            s += geom.T(mu, k, i) * geom.T(nu, k, j) - geom.T(mu, k, j) * geom.T(nu, k, i);
          B(mu, nu) = s;
        }
      out.push_back(B);
    }
  return out;
}

Mat ds_identity_residual(const AmbientSpace& space, const EmbeddingPatch& patch,
                         const FrameField& field, const Vec& params, double h) {
  if (patch.m != 2) throw Error("identity check needs a 2-parameter patch");
  const int N = patch.N, d = N - 2;
  const bool curved = !space.flat();

  // twist one-form on the coordinate tangent c, antisymmetrized
  auto Scoord = [&](const Vec& p, int c, double hh) -> Mat {
    std::vector<Vec> E = field(p);
    Vec xq = patch.embed(p);
    Mat g = space.metric_at(xq);
    Mat J = geom::patch_jacobian(patch, p);
    Tensor3 Gamma = curved ? space.christoffel(xq) : Tensor3();
    Mat S(d, d);
    for (int nu = 0; nu < d; ++nu) {
      auto fv = [&](double s) {
        Vec q = p;
        q(c) += s;
        return field(q)[nu];
      };
      Vec D = deriv1_c4(fv, 0.0, hh);
      if (curved)
        for (int a = 0; a < N; ++a) {
          double corr = 0;
          for (int b = 0; b < N; ++b)
            for (int cc = 0; cc < N; ++cc) corr += Gamma(a, b, cc) * J(b, c) * E[nu](cc);
          D(a) += corr;
        }
      for (int mu = 0; mu < d; ++mu) S(mu, nu) = (E[mu].transpose() * g * D)(0);
    }
    return (0.5 * (S - S.transpose())).eval();
  };

  auto eval = [&](double hh) -> Mat {
    Mat lhs = deriv1_c4(
                  [&](double s) {
                    Vec q = params;
                    q(0) += s;
                    return Scoord(q, 1, hh);
                  },
                  0.0, hh) -
              deriv1_c4(
                  [&](double s) {
                    Vec q = params;
                    q(1) += s;
                    return Scoord(q, 0, hh);
                  },
                  0.0, hh);

    std::vector<Vec> tangent, normal_gs;
    geom::build_frames(space, patch, params, tangent, normal_gs);
    std::vector<Vec> E = field(params);
    Vec x = patch.embed(params);
    Mat g = space.metric_at(x);
    Tensor3 T = geom::second_fundamental_form(space, patch, tangent, E, params);
    std::vector<Vec> combined = E;
    combined.insert(combined.end(), tangent.begin(), tangent.end());
    Tensor4 Rf = geom::frame_riemann(space, x, combined);

    Mat J = geom::patch_jacobian(patch, params);
    Vec c1(2), c2(2);
    for (int i = 0; i < 2; ++i) {
      c1(i) = (J.col(0).transpose() * g * tangent[i])(0);
      c2(i) = (J.col(1).transpose() * g * tangent[i])(0);
    }
    Mat Sx = Scoord(params, 0, hh), Sy = Scoord(params, 1, hh);

    Mat rhs = Mat::Zero(d, d);
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu) {
        double r = 0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) r += c1(i) * c2(j) * Rf(mu, nu, d + i, d + j);
        for (int k = 0; k < 2; ++k) {
          double Txk = c1(0) * T(mu, k, 0) + c1(1) * T(mu, k, 1);
          double Tyk = c2(0) * T(nu, k, 0) + c2(1) * T(nu, k, 1);
          double Tyk_mu = c2(0) * T(mu, k, 0) + c2(1) * T(mu, k, 1);
          double Txk_nu = c1(0) * T(nu, k, 0) + c1(1) * T(nu, k, 1);
          r += Txk * Tyk - Tyk_mu * Txk_nu;
        }
        rhs(mu, nu) = r;
      }
    rhs += -Sx * Sy + Sy * Sx;
    return (lhs - rhs).eval();
  };

  Mat r1 = eval(h), r2 = eval(0.5 * h);
  double n1 = r1.cwiseAbs().maxCoeff(), n2 = r2.cwiseAbs().maxCoeff();
  if (n2 > 0.5 * n1 + 1e-10)
    throw GridTooCoarse("identity residual does not shrink under refinement");
  return r2;
}

}  // namespace tubular::framing
