#include "tubular/effective.hpp"

#include <cmath>
#include <sstream>

#include "tubular/errors.hpp"

namespace tubular::effective {

namespace {

double hermitize(Eigen::MatrixXcd& mat) {
  double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
  double res = (mat - mat.adjoint().eval()).cwiseAbs().maxCoeff() / scale;
  mat = 0.5 * (mat + mat.adjoint().eval());
  return res;
}

}  // namespace

namespace {

void well_depth_forms(const CurvatureScalars& s, double hbar, double out[3]) {
  double pre = -hbar * hbar / 8.0;
  out[0] = pre * (2.0 * s.Tsq - s.Msq + s.R_full - s.R_par - s.R_perp / 3.0);
  out[1] = pre * (s.Tsq - s.R_hat + s.R_full - s.R_perp / 3.0);
  out[2] = pre * (s.Msq - 2.0 * s.R_hat + s.R_full + s.R_par - s.R_perp / 3.0);
}

}  // namespace

double form_spread(const CurvatureScalars& s, double hbar) {
  double f[3];
  well_depth_forms(s, hbar, f);
  return std::max({std::abs(f[0] - f[1]), std::abs(f[0] - f[2]), std::abs(f[1] - f[2])});
}

double geometric_potential_scalar(const CurvatureScalars& s, double hbar) {
  double f[3];
  well_depth_forms(s, hbar, f);
  double f1 = f[0], f2 = f[1], f3 = f[2];
  double scale = std::max({1.0, std::abs(f1), std::abs(f2), std::abs(f3)});
  double spread = std::max({std::abs(f1 - f2), std::abs(f1 - f3), std::abs(f2 - f3)});
  if (spread > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "equivalent well-depth forms disagree: " << f1 << " " << f2 << " " << f3
        << " (inconsistent curvature invariants?)";
    throw FormMismatch(msg.str());
  }
  return f1;
}

PotentialBreakdown geometric_potential(const GeometrySample& g, const ModeSet& modes) {
  const int k = modes.k, d = modes.d;
  const double hb = modes.hbar;
  const double pre = -hb * hb / 8.0;

  PotentialBreakdown out;
  out.curvature_well = pre * (2.0 * g.scalars.Tsq - g.scalars.Msq);
  out.ambient_curvature = pre * (g.scalars.R_full - g.scalars.R_par - g.scalars.R_perp / 3.0);
  out.twist_variance = Eigen::MatrixXcd::Zero(k, k);
  out.curvature_coupling = Eigen::MatrixXcd::Zero(k, k);

  int dirs = g.twist.empty() ? 0 : g.twist.dim(2);
  if (d >= 2) {
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu) {
        if (mu == nu) continue;
        for (int si = 0; si < d; ++si)
          for (int ta = 0; ta < d; ++ta) {
            if (si == ta) continue;
            double sdot = 0.0;
            for (int i = 0; i < dirs; ++i) sdot += g.twist(mu, nu, i) * g.twist(si, ta, i);
            double rcomp = g.normal_riemann.empty() ? 0.0 : g.normal_riemann(mu, nu, si, ta);
            if (sdot == 0.0 && rcomp == 0.0) continue;
            Eigen::MatrixXcd l2 = modes.lambda2(mu, nu, si, ta);
            if (sdot != 0.0)
              out.twist_variance += 0.5 * sdot * (l2 - modes.lambda(mu, nu) * modes.lambda(si, ta));
            if (rcomp != 0.0) out.curvature_coupling += (rcomp / 6.0) * l2;
          }
      }
  }

  out.total = (out.curvature_well + out.ambient_curvature) * Eigen::MatrixXcd::Identity(k, k) +
              out.twist_variance + out.curvature_coupling;
  out.herm_residual = hermitize(out.total);
  if (out.herm_residual > 1e-10) {
    std::ostringstream msg;
    msg << "assembled potential block has hermiticity residual " << out.herm_residual;
    throw NonHermitianResidual(msg.str());
  }
  return out;
}

Eigen::MatrixXcd gauge_block(const Tensor3& twist, const ModeSet& modes, int direction) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(modes.k, modes.k);
  if (twist.empty()) return a;
  for (int mu = 0; mu < modes.d; ++mu)
    for (int nu = mu + 1; nu < modes.d; ++nu) {
      double s = twist(mu, nu, direction);
      if (s != 0.0) a += 2.0 * s * modes.lambda(mu, nu);
    }
  return a;
}

namespace {

void check_sample(const GeometrySample& s, const ModeSet& modes, int m_expected) {
  if (!s.twist.empty()) {
    if (s.twist.dim(0) != modes.d || s.twist.dim(1) != modes.d)
      throw ShapeMismatch("twist tensor normal indices do not match the mode set");
    if (s.twist.dim(2) != m_expected)
      throw ShapeMismatch("twist tensor direction count does not match the grid dimension");
  }
  if (!s.normal_riemann.empty() && s.normal_riemann.dim(0) != modes.d)
    throw ShapeMismatch("curvature block does not match the mode set dimension");
}

}  // namespace

EffectiveField assemble_field(const std::vector<GeometrySample>& samples, const ModeSet& modes,
                              const std::vector<double>& alpha, bool periodic, double length) {
  if (samples.size() != alpha.size())
    throw ShapeMismatch("geometry sample count does not match the arclength grid");
  if (samples.empty()) throw ShapeMismatch("empty sample grid");
  EffectiveField f;
  f.m = 1;
  f.d = modes.d;
  f.k = modes.k;
  f.hbar = modes.hbar;
  f.periodic = periodic;
  f.alpha = alpha;
  f.length = length;
  f.gauge.reserve(samples.size());
  f.well.reserve(samples.size());
  for (const GeometrySample& s : samples) {
    check_sample(s, modes, 1);
    geometric_potential_scalar(s.scalars, modes.hbar);
    f.gauge.push_back(gauge_block(s.twist, modes, 0));
    f.well.push_back(geometric_potential(s, modes));
  }
  return f;
}

EffectiveField assemble_field_rect(const std::vector<GeometrySample>& samples, const ModeSet& modes,
                                   int nu, int nv, double hu, double hv, bool periodic) {
  if (static_cast<int>(samples.size()) != nu * nv)
    throw ShapeMismatch("geometry sample count does not match the rectangle grid");
  if (samples.empty()) throw ShapeMismatch("empty sample grid");
  EffectiveField f;
  f.m = 2;
  f.d = modes.d;
  f.k = modes.k;
  f.hbar = modes.hbar;
  f.periodic = periodic;
  f.nu = nu;
  f.nv = nv;
  f.hu = hu;
  f.hv = hv;
  f.gauge.reserve(samples.size() * 2);
  f.well.reserve(samples.size());
  for (const GeometrySample& s : samples) {
    check_sample(s, modes, 2);
    geometric_potential_scalar(s.scalars, modes.hbar);
    f.gauge.push_back(gauge_block(s.twist, modes, 0));
    f.gauge.push_back(gauge_block(s.twist, modes, 1));
    f.well.push_back(geometric_potential(s, modes));
  }
  return f;
}

EffectiveField with_potential_shift(const EffectiveField& field,
                                    const std::function<double(double)>& shift) {
  if (field.m != 1)
    throw UnsupportedDimension("scalar shift profiles are wired for arclength grids only");
  EffectiveField out = field;
  out.extra_shift.resize(field.alpha.size());
  for (size_t i = 0; i < field.alpha.size(); ++i) out.extra_shift[i] = shift(field.alpha[i]);
  return out;
}

double twist_component(const Tensor3& twist, int direction) {
  if (twist.empty() || twist.dim(0) != 2)
    throw UnsupportedDimension("plane reduction needs exactly two normal directions");
  return twist(0, 1, direction);
}

Eigen::MatrixXcd lambda_component(const ModeSet& modes) {
  if (modes.d != 2)
    throw UnsupportedDimension("plane reduction needs exactly two normal directions");
  return modes.lambda(0, 1);
}

std::vector<GeometrySample> curve_samples(const std::vector<double>& kappa,
                                          const std::vector<double>& twist_rate) {
  if (kappa.size() != twist_rate.size())
    throw ShapeMismatch("curvature and twist arrays differ in length");
  std::vector<GeometrySample> out(kappa.size());
  for (size_t i = 0; i < kappa.size(); ++i) {
    out[i].scalars = geom::curve_scalars(kappa[i]);
    Tensor3 tw(2, 2, 1);
    tw(0, 1, 0) = twist_rate[i];
    tw(1, 0, 0) = -twist_rate[i];
    out[i].twist = tw;
  }
  return out;
}

Tensor4 normal_block(const Tensor4& combined, int d) {
  Tensor4 out(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) out(a, b, c, e) = combined(a, b, c, e);
  return out;
}

}  // namespace tubular::effective
