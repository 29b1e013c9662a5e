#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "support/hermite_oracle.hpp"
#include "tubular/errors.hpp"
#include "tubular/numerics.hpp"
#include "tubular/transverse.hpp"

using namespace tubular;
using namespace tubular::transverse;

namespace {

// diagonal <Lambda_12^2> for occupation n at frequencies w, hbar = 1
double lambda2_closed_form(int n1, int n2, double w1, double w2) {
  return (1.0 / 8.0) * (2.0 * (n1 + 0.5) * (n2 + 0.5) * (w1 * w1 + w2 * w2) / (w1 * w2) - 1.0);
}

}  // namespace

TEST_CASE("harmonic mode construction") {
  ModeSet g = harmonic_modes({1.0, 1.0}, {{0, 0}});
  CHECK(g.k == 1);
  CHECK(g.E_perp == doctest::Approx(1.0).epsilon(1e-14));

  ModeSet pair = harmonic_modes({1.0, 1.0}, {{1, 0}, {0, 1}});
  CHECK(pair.k == 2);
  CHECK(pair.E_perp == doctest::Approx(2.0).epsilon(1e-14));

  ModeSet mixed = harmonic_modes({1.0, 2.0}, {{2, 0}, {0, 1}});
  CHECK(mixed.E_perp == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(mixed.energies[1] == doctest::Approx(3.5).epsilon(1e-14));

  CHECK_THROWS_AS(harmonic_modes({1.0, 1.0}, {{0, 0}, {1, 0}}), NotDegenerate);
  CHECK_THROWS_AS(harmonic_modes({1.0, -1.0}, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(harmonic_modes({1.0, 1.0}, {{0}}), ValidationError);
}

TEST_CASE("ladder angular momentum matches the closed form") {
  for (auto [w1, w2] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {1.0, 5.0 / 3.0}}) {
    for (int n1 = 0; n1 <= 2; ++n1)
      for (int n2 = 0; n2 <= 2; ++n2) {
        ModeSet m = harmonic_modes({w1, w2}, {{n1, n2}});
        CHECK(std::abs(m.Lambda[0](0, 0)) < 1e-12);
        double expect = lambda2_closed_form(n1, n2, w1, w2);
        CHECK(m.Lambda2[0](0, 0).real() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::abs(m.Lambda2[0](0, 0).imag()) < 1e-14);
        // variance of a Hermitian operator is non-negative
        CHECK(expect >= -1e-10);
      }
  }
  // frozen spot values
  CHECK(harmonic_modes({1.0, 1.0}, {{0, 0}}).Lambda2[0](0, 0).real() ==
        doctest::Approx(0.0).epsilon(1e-13));
  CHECK(harmonic_modes({1.0, 1.0}, {{1, 0}}).Lambda2[0](0, 0).real() ==
        doctest::Approx(0.25).epsilon(1e-13));
  CHECK(harmonic_modes({1.0, 2.0}, {{0, 0}}).Lambda2[0](0, 0).real() ==
        doctest::Approx(1.0 / 32).epsilon(1e-13));
}

TEST_CASE("ladder elements agree with Hermite quadrature") {
  for (auto [w1, w2] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {1.0, 5.0 / 3.0}}) {
    int nmax = 3;
    FockBasis basis = FockBasis::with_total(2, 2 * nmax + 2);
    Eigen::MatrixXcd Lf = fock_lambda(basis, 0, 1, {w1, w2}, 1.0);
    Eigen::MatrixXcd Lq = oracle::lambda_quadrature(nmax + 2, w1, w2, 1.0);
    Eigen::MatrixXcd L2q = Lq * Lq;
    int nl = nmax + 3;
    for (int a1 = 0; a1 <= nmax; ++a1)
      for (int a2 = 0; a2 <= nmax; ++a2)
        for (int b1 = 0; b1 <= nmax; ++b1)
          for (int b2 = 0; b2 <= nmax; ++b2) {
            int rf = basis.index({a1, a2});
            int cf = basis.index({b1, b2});
            std::complex<double> lad = Lf(rf, cf);
            std::complex<double> quad = Lq(a1 * nl + a2, b1 * nl + b2);
            CHECK(std::abs(lad - quad) < 1e-8);
            Eigen::MatrixXcd prod = Lf * Lf;
            CHECK(std::abs(prod(rf, cf) - L2q(a1 * nl + a2, b1 * nl + b2)) < 1e-8);
          }
  }
}

TEST_CASE("commutator algebra of the rescaled generators") {
  CHECK(omega_commutator_check(2, 8) < 1e-12);
  CHECK(omega_commutator_check(3, 4) < 1e-12);
  CHECK(omega_commutator_check(3, 4, 0.7) < 1e-12);
}

TEST_CASE("square well on the grid") {
  std::vector<Eigen::Vector2d> sq = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  TransversePotential pot = polygon_potential(sq);
  double exact = M_PI * M_PI;  // two directions, hbar = 1, L = 1

  GridSpec spec;
  spec.n = 128;
  ModeSet m = grid_modes(pot, spec, 1);
  CHECK(m.E_perp == doctest::Approx(exact).epsilon(0.01));

  SUBCASE("second order convergence") {
    std::vector<double> hs, errs;
    for (int n : {64, 128, 256}) {
      GridSpec s2;
      s2.n = n;
      s2.check_resolution = false;
      ModeSet mm = grid_modes(pot, s2, 1);
      hs.push_back(1.0 / (n - 1));
      errs.push_back(std::abs(mm.E_perp - exact));
    }
    CHECK(loglog_slope(hs, errs) > 1.8);
  }

  SUBCASE("reflection symmetry forces vanishing diagonal angular momentum") {
    auto verdicts = reflection_symmetry_report(pot, m);
    REQUIRE(verdicts.size() == 2);
    for (const auto& v : verdicts) {
      CHECK(v.symmetric);
      CHECK(v.lambda_vanishes);
    }
  }
}

TEST_CASE("disk and triangle wells on the grid") {
  SUBCASE("hard wall disk ground energy") {
    std::vector<Eigen::Vector2d> poly;
    double a = 0.5;
    for (int i = 0; i < 96; ++i)
      poly.emplace_back(a * std::cos(2 * M_PI * i / 96), a * std::sin(2 * M_PI * i / 96));
    TransversePotential pot = polygon_potential(poly);
    GridSpec spec;
    spec.n = 128;
    ModeSet m = grid_modes(pot, spec, 1);
    double j01 = 2.404825557695773;
    CHECK(m.E_perp == doctest::Approx(j01 * j01 / (2 * a * a)).epsilon(0.01));
  }

  SUBCASE("equilateral triangle ground energy") {
    double s3 = std::sqrt(3.0);
    std::vector<Eigen::Vector2d> tri = {{0.0, 1.0 / s3}, {-0.5, -0.5 / s3}, {0.5, -0.5 / s3}};
    TransversePotential pot = polygon_potential(tri);
    GridSpec spec;
    // slanted walls land between lattice points, so the boundary error is
    // first order and needs the finer grid to stay inside one percent
    spec.n = 256;
    ModeSet m = grid_modes(pot, spec, 1);
    CHECK(m.E_perp == doctest::Approx(8.0 * M_PI * M_PI / 3.0).epsilon(0.01));
  }
}

TEST_CASE("harmonic potential solved on the grid matches the ladder algebra") {
  TransversePotential pot = harmonic_potential({1.0, 2.0});
  GridSpec spec;
  spec.n = 128;
  spec.nine_point = true;
  ModeSet m = grid_modes(pot, spec, 1);
  CHECK(m.E_perp == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(std::abs(m.Lambda[0](0, 0)) < 1e-8);
  CHECK(std::abs(m.Lambda2[0](0, 0).real() - 1.0 / 32) < 1e-4);
  CHECK(m.Lambda2[0](0, 0).real() - std::norm(m.Lambda[0](0, 0)) >= -1e-10);

  SUBCASE("degenerate isotropic pair") {
    TransversePotential iso = harmonic_potential({1.0, 1.0});
    GridSpec s2;
    s2.n = 128;
    s2.nine_point = true;
    s2.index0 = 1;
    ModeSet pair = grid_modes(iso, s2, 2);
    CHECK(pair.k == 2);
    CHECK(pair.E_perp == doctest::Approx(2.0).epsilon(1e-4));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pair.Lambda[0]);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5).epsilon(2e-4));
    CHECK(es.eigenvalues()(1) == doctest::Approx(0.5).epsilon(2e-4));
    // requesting half of the pair must fail
    GridSpec s3 = s2;
    CHECK_THROWS_AS(grid_modes(iso, s3, 1), DegeneracySplit);
  }
}

TEST_CASE("resolution guard rejects an unresolved sliver") {
  std::vector<Eigen::Vector2d> sliver = {{-0.5, -0.04}, {0.5, -0.04}, {0.5, 0.04}, {-0.5, 0.04}};
  TransversePotential pot = polygon_potential(sliver);
  GridSpec spec;
  spec.n = 64;
  CHECK_THROWS_AS(grid_modes(pot, spec, 1), ResolutionInsufficient);
}

TEST_CASE("scalene triangle breaks every coordinate reflection") {
  std::vector<Eigen::Vector2d> tri = {{-0.5, -0.4}, {0.6, -0.25}, {0.05, 0.55}};
  TransversePotential pot = polygon_potential(tri);
  GridSpec spec;
  spec.n = 96;
  ModeSet m = grid_modes(pot, spec, 1);
  auto verdicts = reflection_symmetry_report(pot, m);
  for (const auto& v : verdicts) CHECK_FALSE(v.symmetric);
}

TEST_CASE("analytic disk clusters") {
  double j01 = 2.404825557695773, j11 = 3.831705970207512;
  ModeSet g = disk_modes(1.3, 0);
  CHECK(g.k == 1);
  CHECK(g.E_perp == doctest::Approx(j01 * j01 / (2 * 1.3 * 1.3)).epsilon(1e-12));
  CHECK(std::abs(g.Lambda[0](0, 0)) == 0.0);

  ModeSet p = disk_modes(1.3, 1);
  CHECK(p.k == 2);
  CHECK(p.E_perp == doctest::Approx(j11 * j11 / (2 * 1.3 * 1.3)).epsilon(1e-12));
  CHECK(p.Lambda[0](0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.Lambda[0](1, 1).real() == doctest::Approx(-0.5).epsilon(1e-14));
  // angular momentum eigenstates carry zero variance
  Eigen::MatrixXcd var = p.Lambda2[0] - p.Lambda[0] * p.Lambda[0];
  CHECK(var.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("casimir clusters of the grid disk do not mix") {
  std::vector<Eigen::Vector2d> poly;
  double a = 0.5;
  for (int i = 0; i < 96; ++i)
    poly.emplace_back(a * std::cos(2 * M_PI * i / 96), a * std::sin(2 * M_PI * i / 96));
  TransversePotential pot = polygon_potential(poly);
  GridSpec spec;
  spec.n = 96;
  spec.check_resolution = false;
  ModeSet ground = grid_modes(pot, spec, 1);
  GridSpec s2 = spec;
  s2.index0 = 1;
  ModeSet pair = grid_modes(pot, s2, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXcd lphi =
        apply_lambda_grid(pair.grid, pair.grid.modes.col(c).cast<std::complex<double>>(), 1.0);
    std::complex<double> cross =
        ground.grid.modes.col(0).cast<std::complex<double>>().dot(lphi) * pair.grid.h *
        pair.grid.h;
    CHECK(std::abs(cross) < 2e-3);
  }
}

TEST_CASE("polygon validation") {
  std::vector<Eigen::Vector2d> bowtie = {{-1, -1}, {1, 1}, {1, -1}, {-1, 1}};
  CHECK_THROWS_AS(polygon_potential(bowtie), ValidationError);
  std::vector<Eigen::Vector2d> off = {{1, 1}, {2, 1}, {2, 2}, {1, 2}};
  CHECK_THROWS_AS(polygon_potential(off), ValidationError);  // origin outside
  std::vector<Eigen::Vector2d> two = {{-1, -1}, {1, 1}};
  CHECK_THROWS_AS(polygon_potential(two), ValidationError);
}
