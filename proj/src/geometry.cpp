#include "tubular/geometry.hpp"

#include <array>
#include <cmath>

#include "tubular/errors.hpp"
#include "tubular/numerics.hpp"

namespace tubular::geom {

// ---------------------------------------------------------------------------
// Ambient space
// ---------------------------------------------------------------------------

Mat AmbientSpace::metric_at(const Vec& x) const {
  if (flat()) return Mat::Identity(dim, dim);
  Mat g = metric(x);
  if (g.rows() != dim || g.cols() != dim) throw Error("metric callable returned wrong shape");
  if (!g.allFinite()) throw SingularMetric("metric has non-finite entries");
  return 0.5 * (g + g.transpose());
}

Mat AmbientSpace::metric_inverse_at(const Vec& x) const {
  if (flat()) return Mat::Identity(dim, dim);
  Mat g = metric_at(x);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const auto& ev = es.eigenvalues();
  if (ev(0) <= 1e-12 * std::max(1.0, ev(dim - 1)))
    throw SingularMetric("metric not positive definite at evaluation point");
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Tensor3 AmbientSpace::christoffel(const Vec& x) const {
  const int n = dim;
  Tensor3 G(n, n, n);
  if (flat()) return G;
  Mat ginv = metric_inverse_at(x);
  std::vector<Mat> dg(n);
  for (int b = 0; b < n; ++b) {
    auto f = [&](double s) {
      Vec y = x;
      y(b) += s;
      return metric_at(y);
    };
    dg[b] = deriv1_c4(f, 0.0, fd_step);
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        double s = 0;
        for (int d = 0; d < n; ++d)
          s += 0.5 * ginv(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        G(a, b, c) = s;
        G(a, c, b) = s;
      }
  return G;
}

Tensor4 ambient_riemann(const AmbientSpace& space, const Vec& x) {
  const int n = space.dim;
  Tensor4 R(n);
  if (space.flat()) return R;
  Mat g = space.metric_at(x);
  Tensor3 G = space.christoffel(x);
  // dG[c](a, d, b) = partial_c Gamma^a_{db}
  std::vector<Tensor3> dG(n);
  const double h = space.fd_step;
  for (int c = 0; c < n; ++c) {
    Vec xp = x, xp2 = x, xm = x, xm2 = x;
    xp(c) += h;
    xp2(c) += 2 * h;
    xm(c) -= h;
    xm2(c) -= 2 * h;
    Tensor3 Gp = space.christoffel(xp), Gp2 = space.christoffel(xp2);
    Tensor3 Gm = space.christoffel(xm), Gm2 = space.christoffel(xm2);
    Tensor3 D(n, n, n);
    for (int a = 0; a < n; ++a)
      for (int d = 0; d < n; ++d)
        for (int b = 0; b < n; ++b)
          D(a, d, b) =
              (-Gp2(a, d, b) + 8 * Gp(a, d, b) - 8 * Gm(a, d, b) + Gm2(a, d, b)) / (12 * h);
    dG[c] = std::move(D);
  }
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d) {
        for (int a = 0; a < n; ++a) {
          double up = dG[c](a, d, b) - dG[d](a, c, b);
          for (int f = 0; f < n; ++f) up += G(a, c, f) * G(f, d, b) - G(a, d, f) * G(f, c, b);
          for (int e = 0; e < n; ++e) R(e, b, c, d) += g(e, a) * up;
        }
      }
  return R;
}

Tensor4 frame_riemann(const AmbientSpace& space, const Vec& x, const std::vector<Vec>& frame) {
  const int n = static_cast<int>(frame.size());
  Tensor4 out(n);
  if (space.flat()) return out;
  const int N = space.dim;
  Tensor4 Rc = ambient_riemann(space, x);
  Tensor4 Rf(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          double s = 0;
          for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q)
              for (int r = 0; r < N; ++r)
                for (int t = 0; t < N; ++t)
                  s += Rc(p, q, r, t) * frame[a](p) * frame[b](q) * frame[c](r) * frame[e](t);
          Rf(a, b, c, e) = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e)
          out(a, b, c, e) =
              0.25 * (Rf(a, b, c, e) - Rf(b, a, c, e) - Rf(a, b, e, c) + Rf(b, a, e, c));
  return out;
}

double scalar_curvature(const AmbientSpace& space, const Vec& x) {
  if (space.flat()) return 0.0;
  const int n = space.dim;
  Tensor4 R = ambient_riemann(space, x);
  Mat ginv = space.metric_inverse_at(x);
  double s = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) s += ginv(a, c) * ginv(b, d) * R(a, b, c, d);
  return s;
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

FrenetData frenet_data(const std::function<Vector3d(double)>& curve_map, double alpha, double h,
                       const std::optional<Vector3d>& prior_normal) {
  if (h <= 0) throw Error("frenet_data: step must be positive");
  std::array<Vector3d, 9> xs;  // offsets -4..4
  for (int j = -4; j <= 4; ++j) xs[j + 4] = curve_map(alpha + j * h);

  auto d1 = [&](int c) {
    return ((-xs[c + 2] + 8 * xs[c + 1] - 8 * xs[c - 1] + xs[c - 2]) / (12 * h)).eval();
  };
  auto d2 = [&](int c) {
    return ((-xs[c + 2] + 16 * xs[c + 1] - 30 * xs[c] + 16 * xs[c - 1] - xs[c - 2]) / (12 * h * h))
        .eval();
  };

  Vector3d xp = d1(4);
  double speed = xp.norm();
  if (std::abs(speed - 1.0) > 1e-6)
    throw NonUnitSpeed("curve speed " + std::to_string(speed) + " at alpha=" +
                       std::to_string(alpha) + "; expected arclength parameterization");

  struct Local {
    Vector3d t, n, b;
    double kappa;
    bool curved;
  };
  auto frame_at = [&](int c) {
    Local f;
    f.t = d1(c).normalized();
    Vector3d acc = d2(c);
    Vector3d kv = acc - acc.dot(f.t) * f.t;
    f.kappa = kv.norm();
    f.curved = f.kappa >= kappa_min;
    if (f.curved) {
      f.n = kv / f.kappa;
      f.b = f.t.cross(f.n);
    }
    return f;
  };

  Local c0 = frame_at(4);
  FrenetData out;
  out.t = c0.t;
  out.kappa = c0.kappa;
  if (!c0.curved) {
    if (!prior_normal)
      throw DegenerateFrame("curvature below threshold and no prior normal to transport");
    Vector3d n = *prior_normal - prior_normal->dot(out.t) * out.t;
    if (n.norm() < 1e-10) throw DegenerateFrame("prior normal parallel to tangent");
    out.n = n.normalized();
    out.b = out.t.cross(out.n);
    return out;
  }
  out.n = c0.n;
  out.b = c0.b;

  Local cm2 = frame_at(2), cm1 = frame_at(3), cp1 = frame_at(5), cp2 = frame_at(6);
  if (cm2.curved && cm1.curved && cp1.curved && cp2.curved) {
    Vector3d db = (-cp2.b + 8 * cp1.b - 8 * cm1.b + cm2.b) / (12 * h);
    out.tau = -out.n.dot(db);
    out.tau_defined = true;
  }
  return out;
}

double CurveGeometry::spacing() const {
  if (samples.size() < 2) return 0.0;
  return samples[1].alpha - samples[0].alpha;
}

namespace {

// Frenet data from generic-parameter derivatives. Returns false when the
// curvature is below threshold (caller transports the previous normal).
bool frame_from_derivatives(const Vector3d& x1, const Vector3d& x2, const Vector3d& x3,
                            CurveSample& s) {
  double v = x1.norm();
  s.t = x1 / v;
  Vector3d cr = x1.cross(x2);
  s.kappa = cr.norm() / (v * v * v);
  if (s.kappa < kappa_min) {
    s.tau = 0;
    s.tau_defined = false;
    return false;
  }
  // (x' x x'') x x' is a positive multiple of the curvature vector
  s.n = cr.cross(x1).normalized();
  s.b = s.t.cross(s.n);
  s.tau = cr.dot(x3) / cr.squaredNorm();
  s.tau_defined = true;
  return true;
}

Vector3d transported_normal(const Vector3d& t, const Vector3d& prev_n) {
  Vector3d n = prev_n - prev_n.dot(t) * t;
  if (n.norm() < 1e-10) throw DegenerateFrame("transported normal collapsed onto tangent");
  return n.normalized();
}

Vector3d seed_normal(const Vector3d& t) {
  int best = 0;
  double bestdot = 2.0;
  for (int i = 0; i < 3; ++i) {
    double d = std::abs(t(i));
    if (d < bestdot) {
      bestdot = d;
      best = i;
    }
  }
  Vector3d e = Vector3d::Zero();
  e(best) = 1.0;
  return (e - e.dot(t) * t).normalized();
}

}  // namespace

CurveGeometry arclength_reparameterize(const std::function<Vector3d(double)>& curve_map, double s0,
                                       double s1, int n, bool closed) {
  if (n < 4) throw Error("arclength_reparameterize: need at least 4 samples");
  if (!(s1 > s0)) throw Error("arclength_reparameterize: empty parameter interval");
  const double span = s1 - s0;
  const double h1 = span * 1e-4;
  const double h2 = span * 3e-4;
  const double h3 = span * 1e-3;

  auto d1 = [&](double s) {
    return ((-curve_map(s + 2 * h1) + 8 * curve_map(s + h1) - 8 * curve_map(s - h1) +
             curve_map(s - 2 * h1)) /
            (12 * h1))
        .eval();
  };
  auto speed = [&](double s) { return d1(s).norm(); };

  const int scan = std::max(64, 4 * n);
  bool unit = true;
  for (int k = 0; k <= scan; ++k) {
    double sp = speed(s0 + span * k / scan);
    if (sp < 1e-10)
      throw ZeroSpeed("curve speed vanishes near parameter " +
                      std::to_string(s0 + span * k / scan));
    if (std::abs(sp - 1.0) > 1e-9) unit = false;
  }

  double L = unit ? span : integrate_adaptive(speed, s0, s1, 1e-12 * std::max(1.0, span));
  const int intervals = closed ? n : n - 1;
  const double ha = L / intervals;

  std::vector<double> snode(n);
  snode[0] = s0;
  if (unit) {
    for (int k = 1; k < n; ++k) snode[k] = s0 + k * ha;
  } else {
    double sc = s0;
    for (int k = 1; k < n; ++k) {
      double s = sc + ha / speed(sc);
      for (int iter = 0; iter < 60; ++iter) {
        double err = integrate_adaptive(speed, sc, s, 1e-13 * std::max(1.0, ha)) - ha;
        if (std::abs(err) < 1e-12 * std::max(1.0, L)) break;
        s -= err / speed(s);
      }
      snode[k] = s;
      sc = s;
    }
  }

  CurveGeometry geo;
  geo.closed = closed;
  geo.length = L;
  geo.samples.resize(n);
  for (int k = 0; k < n; ++k) {
    double s = snode[k];
    CurveSample& cs = geo.samples[k];
    cs.alpha = k * ha;
    cs.x = curve_map(s);
    Vector3d x1 = d1(s);
    Vector3d x2 = deriv2_c4(curve_map, s, h2);
    static const std::vector<double> off3 = {-3, -2, -1, 0, 1, 2, 3};
    std::vector<double> w3 = fd_weights(0.0, off3, 3);
    Vector3d x3 = Vector3d::Zero();
    for (int j = 0; j < 7; ++j) x3 += w3[j] * curve_map(s + off3[j] * h3);
    x3 /= h3 * h3 * h3;
    if (!frame_from_derivatives(x1, x2, x3, cs)) {
      Vector3d prev = (k == 0) ? seed_normal(cs.t) : geo.samples[k - 1].n;
      cs.n = (k == 0) ? prev : transported_normal(cs.t, prev);
      cs.b = cs.t.cross(cs.n);
    }
  }
  return geo;
}

CurveGeometry curve_from_samples(const std::vector<double>& alpha,
                                 const std::vector<Vector3d>& x, bool closed) {
  const int n = static_cast<int>(alpha.size());
  if (static_cast<int>(x.size()) != n) throw Error("curve_from_samples: size mismatch");
  if (n < 8) throw Error("curve_from_samples: need at least 8 samples");
  const double h = alpha[1] - alpha[0];
  for (int k = 0; k + 1 < n; ++k)
    if (std::abs(alpha[k + 1] - alpha[k] - h) > 1e-9 * (1 + std::abs(h)))
      throw Error("curve_from_samples: nonuniform spacing");

  auto node = [&](int j) {
    if (closed) return x[(j % n + n) % n];
    return x[j];
  };

  CurveGeometry geo;
  geo.closed = closed;
  geo.length = closed ? n * h : (n - 1) * h;
  geo.samples.resize(n);

  // derivative at node k from a window of w nodes (wrapped when closed)
  auto deriv = [&](int k, int w, int order) {
    int lo = closed ? k - w / 2 : std::max(0, std::min(k - w / 2, n - w));
    std::vector<double> pos(w);
    for (int j = 0; j < w; ++j) pos[j] = (lo + j - k) * h;
    std::vector<double> wt = fd_weights(0.0, pos, order);
    Vector3d out = Vector3d::Zero();
    for (int j = 0; j < w; ++j) out += wt[j] * node(lo + j);
    return out;
  };

  for (int k = 0; k < n; ++k) {
    CurveSample& cs = geo.samples[k];
    cs.alpha = alpha[k];
    cs.x = x[k];
    Vector3d x1 = deriv(k, 5, 1);
    double sp = x1.norm();
    if (std::abs(sp - 1.0) > 1e-3)
      throw NonUnitSpeed("sampled curve speed " + std::to_string(sp) + " at index " +
                         std::to_string(k));
    Vector3d x2 = deriv(k, 5, 2);
    Vector3d x3 = deriv(k, 7, 3);
    if (!frame_from_derivatives(x1, x2, x3, cs)) {
      Vector3d prev = (k == 0) ? seed_normal(cs.t) : geo.samples[k - 1].n;
      cs.n = (k == 0) ? prev : transported_normal(cs.t, prev);
      cs.b = cs.t.cross(cs.n);
    }
  }
  return geo;
}

CurveFamily circle3(double rho) {
  CurveFamily f;
  f.map = [rho](double s) { return Vector3d(rho * std::cos(s / rho), rho * std::sin(s / rho), 0); };
  f.s0 = 0;
  f.s1 = 2 * M_PI * rho;
  f.closed = true;
  return f;
}

CurveFamily helix3(double a, double b) {
  double c = std::hypot(a, b);
  CurveFamily f;
  f.map = [a, b, c](double s) {
    return Vector3d(a * std::cos(s / c), a * std::sin(s / c), b * s / c);
  };
  f.s0 = 0;
  f.s1 = 2 * M_PI * c;
  f.closed = false;
  return f;
}

CurveFamily line3(double length) {
  CurveFamily f;
  f.map = [](double s) { return Vector3d(s, 0, 0); };
  f.s0 = 0;
  f.s1 = length;
  f.closed = false;
  return f;
}

CurveFamily ellipse3(double a, double b) {
  CurveFamily f;
  f.map = [a, b](double t) { return Vector3d(a * std::cos(t), b * std::sin(t), 0); };
  f.s0 = 0;
  f.s1 = 2 * M_PI;
  f.closed = true;
  return f;
}

PlanarCurve planar_segment(double length) {
  PlanarCurve c;
  c.x = [](double a) { return Vector2d(a, 0); };
  c.tangent = [](double) { return Vector2d(1, 0); };
  c.kappa = [](double) { return 0.0; };
  c.mean_kappa = [](double, double) { return 0.0; };
  c.mean_kappa_sq = [](double, double) { return 0.0; };
  c.length = length;
  c.closed = false;
  return c;
}

PlanarCurve planar_circle(double rho) {
  PlanarCurve c;
  c.x = [rho](double a) { return Vector2d(rho * std::cos(a / rho), rho * std::sin(a / rho)); };
  c.tangent = [rho](double a) { return Vector2d(-std::sin(a / rho), std::cos(a / rho)); };
  c.kappa = [rho](double) { return 1.0 / rho; };
  c.mean_kappa = [rho](double, double) { return 1.0 / rho; };
  c.mean_kappa_sq = [rho](double, double) { return 1.0 / (rho * rho); };
  c.length = 2 * M_PI * rho;
  c.closed = true;
  return c;
}

PlanarCurve planar_arc_line(double rho, double angle, double lead) {
  if (rho <= 0 || angle <= 0 || lead < 0) throw Error("planar_arc_line: bad parameters");
  const double arc = rho * angle;
  PlanarCurve c;
  c.length = 2 * lead + arc;
  c.closed = false;
  c.x = [=](double a) {
    if (a < lead) return Vector2d(a, 0);
    if (a <= lead + arc) {
      double phi = (a - lead) / rho;
      return Vector2d(lead + rho * std::sin(phi), rho * (1 - std::cos(phi)));
    }
    double phi = angle;
    Vector2d end(lead + rho * std::sin(phi), rho * (1 - std::cos(phi)));
    Vector2d t(std::cos(phi), std::sin(phi));
    return (end + (a - lead - arc) * t).eval();
  };
  c.tangent = [=](double a) {
    double phi = std::clamp((a - lead) / rho, 0.0, angle);
    return Vector2d(std::cos(phi), std::sin(phi));
  };
  c.kappa = [=](double a) { return (a >= lead && a <= lead + arc) ? 1.0 / rho : 0.0; };
  // The curvature is piecewise constant, so the window averages are exact:
  // the fraction of [a, b] that overlaps the arc times the arc value.
  auto overlap = [=](double a, double b) {
    double lo = std::max(a, lead), hi = std::min(b, lead + arc);
    double w = b - a;
    return w > 0 ? std::max(0.0, hi - lo) / w : 0.0;
  };
  c.mean_kappa = [=](double a, double b) { return overlap(a, b) / rho; };
  c.mean_kappa_sq = [=](double a, double b) { return overlap(a, b) / (rho * rho); };
  return c;
}

// ---------------------------------------------------------------------------
// Embedded submanifolds
// ---------------------------------------------------------------------------

Mat patch_jacobian(const EmbeddingPatch& patch, const Vec& p) {
  Mat J(patch.N, patch.m);
  const double h = patch.fd_step;
  for (int i = 0; i < patch.m; ++i) {
    auto f = [&](double s) {
      Vec q = p;
      q(i) += s;
      return patch.embed(q);
    };
    J.col(i) = deriv1_c4(f, 0.0, h);
  }
  return J;
}

namespace {

struct FrameBasis {
  std::vector<Vec> tangent, normal;
  Mat coeff;  // tangent[i] = J * coeff.col(i)
};

FrameBasis frame_basis(const AmbientSpace& space, const EmbeddingPatch& patch, const Vec& p) {
  const int m = patch.m, N = patch.N, d = N - m;
  Vec x = patch.embed(p);
  Mat g = space.metric_at(x);
  Mat J = patch_jacobian(patch, p);
  Mat gram = J.transpose() * g * J;

  FrameBasis fb;
  fb.coeff = Mat::Zero(m, m);
  // Gram-Schmidt in coefficient space, column order fixed
  for (int i = 0; i < m; ++i) {
    Vec a = Vec::Zero(m);
    a(i) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < i; ++j) a -= (fb.coeff.col(j).transpose() * gram * a)(0) * fb.coeff.col(j);
    double nn = std::sqrt((a.transpose() * gram * a)(0));
    if (!(nn > 1e-10)) throw DegenerateFrame("jacobian columns are linearly dependent");
    fb.coeff.col(i) = a / nn;
    fb.tangent.push_back(J * fb.coeff.col(i));
  }

  auto inner = [&](const Vec& u, const Vec& v) { return (u.transpose() * g * v)(0); };
  auto project_out = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& t : fb.tangent) v -= inner(t, v) * t;
      for (const Vec& q : fb.normal) v -= inner(q, v) * q;
    }
    return v;
  };
  for (double thresh : {0.3, 1e-8}) {
    for (int a = 0; a < N && static_cast<int>(fb.normal.size()) < d; ++a) {
      Vec e = Vec::Zero(N);
      e(a) = 1.0;
      Vec v = project_out(e);
      double nn = std::sqrt(std::max(0.0, inner(v, v)));
      if (nn > thresh) fb.normal.push_back(v / nn);
    }
  }
  if (static_cast<int>(fb.normal.size()) < d)
    throw DegenerateFrame("could not complete the normal frame");
  return fb;
}

}  // namespace

void build_frames(const AmbientSpace& space, const EmbeddingPatch& patch, const Vec& params,
                  std::vector<Vec>& tangent, std::vector<Vec>& normal) {
  FrameBasis fb = frame_basis(space, patch, params);
  tangent = std::move(fb.tangent);
  normal = std::move(fb.normal);
}

Mat tangent_frame_coefficients(const AmbientSpace& space, const EmbeddingPatch& patch,
                               const Vec& params) {
  return frame_basis(space, patch, params).coeff;
}

Tensor3 second_fundamental_form(const AmbientSpace& space, const EmbeddingPatch& patch,
                                const std::vector<Vec>& tangent, const std::vector<Vec>& normal,
                                const Vec& params) {
  const int m = patch.m, N = patch.N, d = N - m;
  if (static_cast<int>(tangent.size()) != m || static_cast<int>(normal.size()) != d)
    throw FrameMismatch("frame counts do not match patch dimensions");
  Vec x = patch.embed(params);
  Mat g = space.metric_at(x);

  std::vector<Vec> all = tangent;
  all.insert(all.end(), normal.begin(), normal.end());
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      double ip = (all[a].transpose() * g * all[b])(0);
      if (std::abs(ip - (a == b ? 1.0 : 0.0)) > 1e-6)
        throw FrameMismatch("supplied frame is not orthonormal in the ambient metric");
    }

  FrameBasis fb = frame_basis(space, patch, params);
  Mat Qt(m, m), Qn(d, d);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) Qt(i, k) = (tangent[i].transpose() * g * fb.tangent[k])(0);
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v) Qn(u, v) = (normal[u].transpose() * g * fb.normal[v])(0);
  if ((Qt.transpose() * Qt - Mat::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-6)
    throw FrameMismatch("supplied tangent frame does not span the tangent space");
  if (d > 0 && (Qn.transpose() * Qn - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-6)
    throw FrameMismatch("supplied normal frame does not span the normal space");

  const bool curved = !space.flat();
  Tensor3 Gamma = curved ? space.christoffel(x) : Tensor3();

  const double hs = 3e-3;
  Tensor3 That(d, m, m);
  for (int k = 0; k < m; ++k) {
    Vec ck = fb.coeff.col(k);  // parameter velocity realizing the k-th frame direction
    for (int l = 0; l < m; ++l) {
      auto field = [&](double s) {
        Vec q = params + s * ck;
        return frame_basis(space, patch, q).tangent[l];
      };
      Vec D = deriv1_c4(field, 0.0, hs);
      if (curved) {
        for (int a = 0; a < N; ++a) {
          double corr = 0;
          for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) corr += Gamma(a, b, c) * fb.tangent[k](b) * fb.tangent[l](c);
          D(a) += corr;
        }
      }
      for (int u = 0; u < d; ++u) That(u, k, l) = (fb.normal[u].transpose() * g * D)(0);
    }
  }
  for (int u = 0; u < d; ++u)
    for (int k = 0; k < m; ++k)
      for (int l = k + 1; l < m; ++l) {
        double sym = 0.5 * (That(u, k, l) + That(u, l, k));
        That(u, k, l) = sym;
        That(u, l, k) = sym;
      }

  Tensor3 T(d, m, m);
  for (int u = 0; u < d; ++u)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int v = 0; v < d; ++v)
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) s += Qn(u, v) * Qt(i, k) * Qt(j, l) * That(v, k, l);
        T(u, i, j) = s;
      }
  return T;
}

EmbeddingGeometry embed_geometry(const AmbientSpace& space, const EmbeddingPatch& patch,
                                 const Vec& params) {
  const int m = patch.m, N = patch.N, d = N - m;
  if (space.dim != N) throw Error("embed_geometry: ambient dimension mismatch");
  EmbeddingGeometry geo;
  geo.m = m;
  geo.d = d;
  geo.params = params;
  geo.q = patch.embed(params);
  build_frames(space, patch, params, geo.tangent_frame, geo.normal_frame);
  geo.T = second_fundamental_form(space, patch, geo.tangent_frame, geo.normal_frame, params);

  // combined frame: d normals first, then m tangents
  std::vector<Vec> F = geo.normal_frame;
  F.insert(F.end(), geo.tangent_frame.begin(), geo.tangent_frame.end());
  geo.R = frame_riemann(space, geo.q, F);
  return geo;
}

CurvatureScalars curvature_scalars(const EmbeddingGeometry& geom) {
  const int m = geom.m, d = geom.d, N = m + d;
  CurvatureScalars s;
  for (int u = 0; u < d; ++u) {
    double tr = 0;
    for (int i = 0; i < m; ++i) {
      tr += geom.T(u, i, i);
      for (int j = 0; j < m; ++j) s.Tsq += geom.T(u, i, j) * geom.T(u, i, j);
    }
    s.Msq += tr * tr;
  }
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) s.R_full += geom.R(a, b, a, b);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s.R_perp += geom.R(a, b, a, b);
  for (int a = d; a < N; ++a)
    for (int b = d; b < N; ++b) s.R_par += geom.R(a, b, a, b);
  s.R_hat = s.Msq - s.Tsq + s.R_par;
  return s;
}

CurvatureScalars curve_scalars(double kappa) {
  CurvatureScalars s;
  s.Tsq = kappa * kappa;
  s.Msq = kappa * kappa;
  s.R_hat = 0;
  return s;
}

AmbientSpace induced_metric_space(const AmbientSpace& space, const EmbeddingPatch& patch) {
  AmbientSpace ind;
  ind.dim = patch.m;
  ind.fd_step = 7e-3;
  AmbientSpace outer = space;
  EmbeddingPatch pt = patch;
  ind.metric = [outer, pt](const Vec& p) {
    Mat J = patch_jacobian(pt, p);
    Mat g = outer.metric_at(pt.embed(p));
    return (J.transpose() * g * J).eval();
  };
  return ind;
}

EmbeddingPatch plane_patch() {
  EmbeddingPatch p;
  p.m = 2;
  p.N = 3;
  p.embed = [](const Vec& q) {
    Vec x(3);
    x << q(0), q(1), 0;
    return x;
  };
  return p;
}

EmbeddingPatch cylinder_patch(double rho) {
  EmbeddingPatch p;
  p.m = 2;
  p.N = 3;
  p.embed = [rho](const Vec& q) {
    Vec x(3);
    x << rho * std::cos(q(1)), rho * std::sin(q(1)), q(0);
    return x;
  };
  return p;
}

EmbeddingPatch sphere_patch(double rho) {
  EmbeddingPatch p;
  p.m = 2;
  p.N = 3;
  p.embed = [rho](const Vec& q) {
    Vec x(3);
    x << rho * std::sin(q(0)) * std::cos(q(1)), rho * std::sin(q(0)) * std::sin(q(1)),
        rho * std::cos(q(0));
    return x;
  };
  return p;
}

EmbeddingPatch torus_patch(double R, double r) {
  EmbeddingPatch p;
  p.m = 2;
  p.N = 3;
  p.embed = [R, r](const Vec& q) {
    Vec x(3);
    x << (R + r * std::cos(q(1))) * std::cos(q(0)), (R + r * std::cos(q(1))) * std::sin(q(0)),
        r * std::sin(q(1));
    return x;
  };
  return p;
}

EmbeddingPatch graph_patch(const std::function<double(double, double)>& f) {
  EmbeddingPatch p;
  p.m = 2;
  p.N = 3;
  p.embed = [f](const Vec& q) {
    Vec x(3);
    x << q(0), q(1), f(q(0), q(1));
    return x;
  };
  return p;
}

EmbeddingPatch graph4_patch(const std::function<double(double, double)>& f,
                            const std::function<double(double, double)>& g) {
  EmbeddingPatch p;
  p.m = 2;
  p.N = 4;
  p.embed = [f, g](const Vec& q) {
    Vec x(4);
    x << q(0), q(1), f(q(0), q(1)), g(q(0), q(1));
    return x;
  };
  return p;
}

EmbeddingPatch flat_torus4_patch(double R1, double R2) {
  EmbeddingPatch p;
  p.m = 2;
  p.N = 4;
  p.embed = [R1, R2](const Vec& q) {
    Vec x(4);
    x << R1 * std::cos(q(0) / R1), R1 * std::sin(q(0) / R1), R2 * std::cos(q(1) / R2),
        R2 * std::sin(q(1) / R2);
    return x;
  };
  return p;
}

EmbeddingPatch identity_patch(int n) {
  EmbeddingPatch p;
  p.m = n;
  p.N = n;
  p.embed = [](const Vec& q) { return q; };
  return p;
}

}  // namespace tubular::geom
