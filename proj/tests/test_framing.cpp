#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "tubular/errors.hpp"
#include "tubular/framing.hpp"
#include "tubular/numerics.hpp"

using namespace tubular;
using namespace tubular::framing;
using geom::CurveGeometry;
using geom::EmbeddingGeometry;
using geom::Vector3d;

namespace {

CurveGeometry helix_curve(int n) {
  auto fam = geom::helix3(3.0, 4.0);
  return geom::arclength_reparameterize(fam.map, 0.0, 10 * M_PI, n, false);
}

geom::AmbientSpace flat(int n) {
  geom::AmbientSpace s;
  s.dim = n;
  return s;
}

}  // namespace

TEST_CASE("frenet-aligned frame on a helix twists at minus the torsion") {
  CurveGeometry curve = helix_curve(256);
  CurveFrame frame = frenet_aligned_frame(curve);
  double raw = 0;
  std::vector<double> S = potential_twist(curve, frame, &raw);
  CHECK(raw < 1e-6);
  for (double s : S) CHECK(s == doctest::Approx(-0.16).epsilon(1e-6));

  auto dec = curve_twist_decomposition(curve, frame);
  for (const auto& d : dec) {
    CHECK(std::abs(d.omega) < 1e-6);
    CHECK(d.tau == doctest::Approx(0.16).epsilon(1e-6));
    CHECK(-d.S == doctest::Approx(d.tau + d.omega).epsilon(1e-6));
  }
}

TEST_CASE("constant rotation about a straight line") {
  auto fam = geom::line3(10.0);
  CurveGeometry curve = geom::arclength_reparameterize(fam.map, fam.s0, fam.s1, 256, false);
  CurveFrame frame = constant_rate_frame(curve, 0.8);
  std::vector<double> S = potential_twist(curve, frame);
  for (double s : S) CHECK(s == doctest::Approx(-0.8).epsilon(1e-6));

  // no frenet normal on a straight line
  CHECK_THROWS_AS(curve_twist_decomposition(curve, frame), DegenerateFrame);
}

TEST_CASE("circle with one frame revolution per loop") {
  auto fam = geom::circle3(2.0);
  CurveGeometry curve = geom::arclength_reparameterize(fam.map, fam.s0, fam.s1, 512, true);
  double L = curve.length;
  CurveFrame frame = rotation_profile_frame(curve, [L](double a) { return 2 * M_PI * a / L; });
  auto dec = curve_twist_decomposition(curve, frame);
  for (const auto& d : dec) {
    CHECK(std::abs(d.tau) < 1e-8);
    CHECK(d.omega == doctest::Approx(2 * M_PI / L).epsilon(1e-8));
    CHECK(d.S == doctest::Approx(-2 * M_PI / L).epsilon(1e-8));
  }
}

TEST_CASE("twist is invariant under a constant frame rotation") {
  CurveGeometry curve = helix_curve(256);
  std::vector<double> a = potential_twist(curve, constant_rate_frame(curve, 0.8, 0.0));
  std::vector<double> b = potential_twist(curve, constant_rate_frame(curve, 0.8, 1.1));
  for (size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-10));
}

TEST_CASE("raw antisymmetry residual converges under refinement") {
  std::vector<double> h, r;
  for (int n : {128, 256, 512}) {
    CurveGeometry curve = helix_curve(n);
    double L = curve.length;
    CurveFrame frame =
        rotation_profile_frame(curve, [L](double a) { return 0.4 * std::sin(4 * M_PI * a / L); });
    double raw = 0;
    potential_twist(curve, frame, &raw);
    h.push_back(L / n);
    r.push_back(raw);
  }
  CHECK(r.back() > 1e-14);  // slope estimate is meaningful
  CHECK(loglog_slope(h, r) > 1.9);
}

TEST_CASE("coarse sampling of a fast twist is rejected") {
  auto fam = geom::line3(10.0);
  CurveGeometry curve = geom::arclength_reparameterize(fam.map, fam.s0, fam.s1, 24, false);
  CurveFrame frame = constant_rate_frame(curve, 40.0);
  CHECK_THROWS_AS(potential_twist(curve, frame), GridTooCoarse);
}

TEST_CASE("frame table interpolation stays orthonormal") {
  CurveGeometry curve = helix_curve(128);
  CurveFrame source = constant_rate_frame(curve, 0.3);
  std::vector<double> ta;
  std::vector<std::array<Vector3d, 2>> tf;
  for (size_t k = 0; k < curve.samples.size(); k += 4) {
    ta.push_back(curve.samples[k].alpha);
    tf.push_back(source.e[k]);
  }
  ta.push_back(curve.samples.back().alpha);
  tf.push_back(source.e.back());
  CurveFrame rebuilt = frame_from_table(curve, ta, tf);
  for (size_t k = 0; k < rebuilt.e.size(); ++k) {
    const auto& [e1, e2] = rebuilt.e[k];
    CHECK(std::abs(e1.norm() - 1) < 1e-12);
    CHECK(std::abs(e1.dot(e2)) < 1e-12);
    CHECK(std::abs(e1.dot(curve.samples[k].t)) < 1e-12);
    CHECK((e1 - source.e[k][0]).norm() < 5e-3);
  }
}

namespace {

// analytic orthonormal normal field of a two-function graph in R^4
FrameField graph4_normals(const std::function<double(double, double)>& fx,
                          const std::function<double(double, double)>& fy,
                          const std::function<double(double, double)>& gx,
                          const std::function<double(double, double)>& gy, double psi1 = 0,
                          double psi2 = 0) {
  return [=](const geom::Vec& p) {
    geom::Vec v1(4), v2(4);
    v1 << -fx(p(0), p(1)), -fy(p(0), p(1)), 1, 0;
    v2 << -gx(p(0), p(1)), -gy(p(0), p(1)), 0, 1;
    v1.normalize();
    v2 -= v2.dot(v1) * v1;
    v2.normalize();
    double ps = psi1 * p(0) + psi2 * p(1);
    std::vector<geom::Vec> out(2);
    out[0] = std::cos(ps) * v1 + std::sin(ps) * v2;
    out[1] = -std::sin(ps) * v1 + std::cos(ps) * v2;
    return out;
  };
}

}  // namespace

TEST_CASE("surface twist of a linearly twisted flat torus frame") {
  auto patch = geom::flat_torus4_patch(1.5, 0.9);
  double w1 = 0.37, w2 = -0.21;
  FrameField field = [&](const geom::Vec& p) {
    double ps = w1 * p(0) + w2 * p(1);
    geom::Vec n1(4), n2(4);
    n1 << std::cos(p(0) / 1.5), std::sin(p(0) / 1.5), 0, 0;
    n2 << 0, 0, std::cos(p(1) / 0.9), std::sin(p(1) / 0.9);
    std::vector<geom::Vec> out(2);
    out[0] = std::cos(ps) * n1 + std::sin(ps) * n2;
    out[1] = -std::sin(ps) * n1 + std::cos(ps) * n2;
    return out;
  };
  geom::Vec p(2);
  p << 0.4, 1.1;
  Mat S0 = potential_twist_surface(flat(4), patch, field, p, 0);
  Mat S1 = potential_twist_surface(flat(4), patch, field, p, 1);
  CHECK(S0(0, 1) == doctest::Approx(-w1).epsilon(1e-8));
  CHECK(S1(0, 1) == doctest::Approx(-w2).epsilon(1e-8));
  CHECK(S0(0, 0) == 0.0);
  CHECK(S0(1, 0) == doctest::Approx(w1).epsilon(1e-8));
}

TEST_CASE("surface twist with a conformal ambient metric") {
  auto patch = geom::flat_torus4_patch(1.5, 0.9);
  geom::AmbientSpace amb;
  amb.dim = 4;
  amb.metric = [](const geom::Vec& x) {
    double phi = 0.1 * x(0) + 0.05 * x(2);
    return (std::exp(2 * phi) * geom::Mat::Identity(4, 4)).eval();
  };
  double w1 = 0.25;
  FrameField field = [&](const geom::Vec& p) {
    geom::Vec n1(4), n2(4);
    n1 << std::cos(p(0) / 1.5), std::sin(p(0) / 1.5), 0, 0;
    n2 << 0, 0, std::cos(p(1) / 0.9), std::sin(p(1) / 0.9);
    double phi = 0.1 * n1(0) * 1.5 + 0.05 * n2(2) * 0.9;  // phi at the surface point
    double ps = w1 * p(0);
    std::vector<geom::Vec> out(2);
    out[0] = std::exp(-phi) * (std::cos(ps) * n1 + std::sin(ps) * n2);
    out[1] = std::exp(-phi) * (-std::sin(ps) * n1 + std::cos(ps) * n2);
    return out;
  };
  geom::Vec p(2);
  p << 0.4, 1.1;
  // conformal rescaling leaves the rotation part of the twist in place
  Mat S0 = potential_twist_surface(amb, patch, field, p, 0);
  CHECK(S0(0, 1) == doctest::Approx(-w1 / std::exp(0.1 * 1.5 * std::cos(p(0) / 1.5) +
                                                   0.05 * 0.9 * std::cos(p(1) / 0.9)))
                        .epsilon(1e-6));
}

TEST_CASE("normal connection curvature") {
  SUBCASE("codimension 1 gives the trivial antisymmetric scalar") {
    auto geo = geom::embed_geometry(flat(3), geom::sphere_patch(1.3), [] {
      geom::Vec p(2);
      p << 0.8, 0.4;
      return p;
    }());
    auto B = normal_curvature(geo);
    REQUIRE(B.size() == 1);
    CHECK(B[0].rows() == 1);
    CHECK(B[0](0, 0) == 0.0);
  }

  SUBCASE("one-dimensional base has no tangent pairs") {
    geom::EmbeddingPatch circ;
    circ.m = 1;
    circ.N = 3;
    circ.embed = [](const geom::Vec& p) {
      geom::Vec x(3);
      x << 2 * std::cos(p(0) / 2), 2 * std::sin(p(0) / 2), 0;
      return x;
    };
    auto geo = geom::embed_geometry(flat(3), circ, [] {
      geom::Vec p(1);
      p << 0.7;
      return p;
    }());
    CHECK(normal_curvature(geo).empty());
  }

  SUBCASE("matches a finite-difference holonomy oracle in R^4") {
    auto f = [](double x, double y) { return 0.2 * x * x + 0.1 * y * y + 0.15 * x * y; };
    auto g = [](double x, double y) { return 0.1 * x * x - 0.2 * y * y + 0.05 * x * y; };
    auto fx = [](double x, double y) { return 0.4 * x + 0.15 * y; };
    auto fy = [](double x, double y) { return 0.2 * y + 0.15 * x; };
    auto gx = [](double x, double y) { return 0.2 * x + 0.05 * y; };
    auto gy = [](double x, double y) { return -0.4 * y + 0.05 * x; };
    auto patch = geom::graph4_patch(f, g);
    geom::AmbientSpace amb = flat(4);
    geom::Vec p(2);
    p << 0.3, -0.2;

    EmbeddingGeometry geo = geom::embed_geometry(amb, patch, p);
    Mat Bform = normal_curvature(geo)[0];

    FrameField field = graph4_normals(fx, fy, gx, gy);
    const double h = 1e-3;
    auto conn = [&](const geom::Vec& q, int c) {
      std::vector<geom::Vec> E = field(q);
      Mat A(2, 2);
      for (int nu = 0; nu < 2; ++nu) {
        auto fv = [&](double s) {
          geom::Vec qq = q;
          qq(c) += s;
          return field(qq)[nu];
        };
        geom::Vec D = deriv1_c4(fv, 0.0, h);
        for (int mu = 0; mu < 2; ++mu) A(mu, nu) = E[mu].dot(D);
      }
      return A;
    };
    Mat A1 = conn(p, 0), A2 = conn(p, 1);
    Mat dA2 = deriv1_c4(
        [&](double s) {
          geom::Vec q = p;
          q(0) += s;
          return conn(q, 1);
        },
        0.0, h);
    Mat dA1 = deriv1_c4(
        [&](double s) {
          geom::Vec q = p;
          q(1) += s;
          return conn(q, 0);
        },
        0.0, h);
    Mat Bcoord = dA2 - dA1 + A1 * A2 - A2 * A1;

    // to the frame tangent pair, then into the deterministic normal frame
    Mat coeff = geom::tangent_frame_coefficients(amb, patch, p);
    double pair = coeff(0, 0) * coeff(1, 1) - coeff(1, 0) * coeff(0, 1);
    Mat Bpair = pair * Bcoord;

    std::vector<geom::Vec> tang, norm;
    geom::build_frames(amb, patch, p, tang, norm);
    std::vector<geom::Vec> E = field(p);
    Mat Q(2, 2);
    for (int mu = 0; mu < 2; ++mu)
      for (int nu = 0; nu < 2; ++nu) Q(mu, nu) = norm[mu].dot(E[nu]);
    Mat Boracle = Q * Bpair * Q.transpose();

    CHECK(Bform.rows() == 2);
    CHECK(std::abs(Bform(0, 1)) > 1e-3);  // a genuinely curved normal bundle
    CHECK(Bform(0, 1) == doctest::Approx(Boracle(0, 1)).epsilon(1e-5));
    CHECK(Bform(0, 0) == doctest::Approx(0.0));
    CHECK(Bform(1, 0) == doctest::Approx(-Bform(0, 1)));
  }
}

TEST_CASE("structure identity for the twist one-form") {
  SUBCASE("twisted frame on the flat torus") {
    auto patch = geom::flat_torus4_patch(1.5, 0.9);
    FrameField field = [&](const geom::Vec& p) {
      double ps = 0.37 * p(0) - 0.21 * p(1);
      geom::Vec n1(4), n2(4);
      n1 << std::cos(p(0) / 1.5), std::sin(p(0) / 1.5), 0, 0;
      n2 << 0, 0, std::cos(p(1) / 0.9), std::sin(p(1) / 0.9);
      std::vector<geom::Vec> out(2);
      out[0] = std::cos(ps) * n1 + std::sin(ps) * n2;
      out[1] = -std::sin(ps) * n1 + std::cos(ps) * n2;
      return out;
    };
    geom::Vec p(2);
    p << 0.4, 1.1;
    Mat r = ds_identity_residual(flat(4), patch, field, p);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("curved normal bundle of a graph in R^4") {
    auto fx = [](double x, double y) { return 0.4 * x + 0.15 * y; };
    auto fy = [](double x, double y) { return 0.2 * y + 0.15 * x; };
    auto gx = [](double x, double y) { return 0.2 * x + 0.05 * y; };
    auto gy = [](double x, double y) { return -0.4 * y + 0.05 * x; };
    auto f = [](double x, double y) { return 0.2 * x * x + 0.1 * y * y + 0.15 * x * y; };
    auto g = [](double x, double y) { return 0.1 * x * x - 0.2 * y * y + 0.05 * x * y; };
    auto patch = geom::graph4_patch(f, g);
    geom::Vec p(2);
    p << 0.3, -0.2;
    FrameField field = graph4_normals(fx, fy, gx, gy, 0.3, -0.15);
    Mat r = ds_identity_residual(flat(4), patch, field, p);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("plane in R^3 is trivial") {
    auto patch = geom::plane_patch();
    FrameField field = [](const geom::Vec&) {
      geom::Vec n(3);
      n << 0, 0, 1;
      return std::vector<geom::Vec>{n};
    };
    geom::Vec p(2);
    p << 0.1, 0.2;
    Mat r = ds_identity_residual(flat(3), patch, field, p);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-10);
  }
}
