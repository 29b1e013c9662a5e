// Acceptance gates for the assembled library: one criterion per run, one
// pass/fail line each, tolerances pinned next to the measurements.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "support/hermite_oracle.hpp"
#include "tubular/checks.hpp"
#include "tubular/effective.hpp"
#include "tubular/errors.hpp"
#include "tubular/geometry.hpp"
#include "tubular/io.hpp"
#include "tubular/run.hpp"
#include "tubular/scenario.hpp"
#include "tubular/solver.hpp"
#include "tubular/transverse.hpp"

using namespace tubular;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "tubular-acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

json run_command(const std::string& scenario_text, const std::string& command,
                 const std::string& out) {
  cli::Scenario s = cli::parse_scenario_text(scenario_text);
  cli::RunOptions opt;
  opt.command = command;
  opt.out_override = out;
  if (cli::run_scenario(s, opt) != 0) throw Error("pipeline returned nonzero");
  std::ifstream in(fs::path(out) / "metadata.json");
  return json::parse(in);
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
  size_t c = 0;
  while (c < t.header.size() && t.header[c] != name) ++c;
  if (c == t.header.size()) throw Error("missing column " + name);
  std::vector<double> out;
  for (const auto& row : t.rows) out.push_back(std::stod(row[c]));
  return out;
}

bool verdict(int n, const char* name, bool ok) {
  std::printf("criterion %d (%s): %s\n", n, name, ok ? "pass" : "FAIL");
  return ok;
}

// the shared bent-guide study: radius 1, quarter turn, straight leads sized so
// both curvature jumps sit on cell faces of the 400-cell grid
std::string bent_guide_scenario() {
  double lead = 182.5 * M_PI / 72.0;
  json j = {{"schema_version", 1},
            {"name", "bent-guide"},
            {"geometry",
             {{"family", "arc_line"}, {"rho", 1.0}, {"angle", M_PI / 2}, {"lead", lead}}},
            {"transverse", {{"kind", "interval"}}},
            {"solver",
             {{"n_alpha", 400}, {"n_u", 40}, {"eps_list", {0.2, 0.1, 0.05}}, {"bc", "dirichlet"}}}};
  return j.dump();
}

// ---------------------------------------------------------------------------

bool criterion_1() {
  constexpr double kFormTol = 1e-12;
  constexpr double kValueTol = 1e-15;

  geom::CurvatureScalars sc = geom::curve_scalars(1.0);
  double spread = effective::form_spread(sc, 1.0);

  transverse::ModeSet modes = transverse::harmonic_modes({1.0}, {{0}}, 1.0);
  const int n = 16;
  std::vector<double> alpha(n), kappa(n, 1.0);
  for (int i = 0; i < n; ++i) alpha[i] = 2.0 * M_PI * i / n;
  std::vector<effective::GeometrySample> gs(n);
  for (int i = 0; i < n; ++i) {
    gs[i].scalars = sc;
    gs[i].twist = Tensor3(1, 1, 1);
    gs[i].normal_riemann = Tensor4(1, 1, 1, 1);
  }
  effective::EffectiveField f =
      effective::assemble_field(gs, modes, alpha, true, 2.0 * M_PI);
  double worst = 0.0;
  for (const auto& pb : f.well)
    worst = std::max(worst, std::abs(pb.total(0, 0) - std::complex<double>(-0.125, 0.0)));

  std::printf("  unit-radius bend: assembled well offset from -1/8 = %.3e (tol %.0e)\n", worst,
              kValueTol);
  std::printf("  equivalent-form spread = %.3e (tol %.0e)\n", spread, kFormTol);
  return verdict(1, "bending potential closed form", worst <= kValueTol && spread <= kFormTol);
}

bool criterion_2() {
  constexpr double kMinOrder = 0.9;
  constexpr double kMaxRel = 0.05;
  constexpr double kMaxSeconds = 60.0;

  auto t0 = std::chrono::steady_clock::now();
  std::string out = fresh_dir("bent-width");
  json meta = run_command(bent_guide_scenario(), "converge", out);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double order = meta["results"]["fitted_order"];
  bool monotone = meta["results"]["monotone_abs_error"];
  double e_eff = meta["results"]["E_effective"];
  CsvTable t = read_csv(out + "/convergence.csv");
  std::vector<double> eps = column(t, "epsilon"), err = column(t, "abs_error");
  double rel = err.back() / std::abs(e_eff);

  for (size_t i = 0; i < eps.size(); ++i)
    std::printf("  width %.3f: |residual - model| = %.4e\n", eps[i], err[i]);
  std::printf("  fitted order %.4f (need >= %.2f), monotone %s\n", order, kMinOrder,
              monotone ? "yes" : "no");
  std::printf("  relative error %.3f%% at width %.3f (tol %.0f%%), runtime %.1f s (tol %.0f s)\n",
              100 * rel, eps.back(), 100 * kMaxRel, seconds, kMaxSeconds);
  return verdict(2, "width limit of a bent guide",
                 monotone && order >= kMinOrder && rel <= kMaxRel && seconds <= kMaxSeconds);
}

bool criterion_3() {
  constexpr double kMatchTol = 0.10;

  std::string out = fresh_dir("bound-state");
  json meta = run_command(bent_guide_scenario(), "converge", out);
  double e_eff = meta["results"]["E_effective"];
  CsvTable t = read_csv(out + "/convergence.csv");
  std::vector<double> eps = column(t, "epsilon"), res = column(t, "E_residual");

  double below_model = -e_eff;
  double below_oracle = -res.back();
  double mismatch = std::abs(below_oracle - below_model) / std::abs(below_model);

  std::printf("  1D level in the compact bending well: %.6e (negative = bound)\n", e_eff);
  std::printf("  2D level sits %.6e below the transverse floor at width %.3f\n", below_oracle,
              eps.back());
  std::printf("  depth mismatch %.2f%% (tol %.0f%%)\n", 100 * mismatch, 100 * kMatchTol);
  return verdict(3, "curvature-induced bound state",
                 e_eff < 0.0 && below_oracle > 0.0 && mismatch <= kMatchTol);
}

bool criterion_4() {
  constexpr double kLadderTol = 1e-8;
  constexpr double kDiagTol = 1e-12;
  const int nmax = 3, nbig = 5;

  double worst_first = 0.0, worst_second = 0.0, worst_diag = 0.0;
  for (double ratio : {1.0, 2.0, 5.0 / 3.0}) {
    std::vector<std::vector<int>> occ;
    for (int n1 = 0; n1 <= nmax; ++n1)
      for (int n2 = 0; n2 <= nmax; ++n2) occ.push_back({n1, n2});
    transverse::ModeSet m = transverse::harmonic_modes({1.0, ratio}, occ, 1.0);
    Eigen::MatrixXcd lam = m.lambda(0, 1);
    Eigen::MatrixXcd lam2 = m.lambda2(0, 1, 0, 1);

    // quadrature on a larger label set so every intermediate state is present
    Eigen::MatrixXcd big = oracle::lambda_quadrature(nbig, 1.0, ratio, 1.0);
    Eigen::MatrixXcd big2 = big * big;
    const int k = static_cast<int>(occ.size());
    auto wide = [&](int i) { return occ[i][0] * (nbig + 1) + occ[i][1]; };
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        worst_first = std::max(worst_first, std::abs(lam(i, j) - big(wide(i), wide(j))));
        worst_second = std::max(worst_second, std::abs(lam2(i, j) - big2(wide(i), wide(j))));
      }
    for (int i = 0; i < k; ++i) worst_diag = std::max(worst_diag, std::abs(lam(i, i)));
  }
  std::printf("  ladder vs quadrature, first moments: %.3e (tol %.0e)\n", worst_first, kLadderTol);
  std::printf("  ladder vs quadrature, second moments: %.3e (tol %.0e)\n", worst_second,
              kLadderTol);
  std::printf("  diagonal means: %.3e (tol %.0e)\n", worst_diag, kDiagTol);
  return verdict(4, "oscillator angular momentum ladders",
                 worst_first <= kLadderTol && worst_second <= kLadderTol &&
                     worst_diag <= kDiagTol);
}

bool criterion_5() {
  constexpr double kFinalTol = 0.01;
  const double L = 80.0 * M_PI;
  const int n_basis = 8;

  transverse::TransversePotential pot = transverse::harmonic_potential({1.0, 2.0});
  transverse::ModeSet ground = transverse::harmonic_modes({1.0, 2.0}, {{0, 0}}, 1.0);
  double mean = ground.lambda(0, 1)(0, 0).real();
  double var = ground.lambda2(0, 1, 0, 1)(0, 0).real() - mean * mean;
  double coeff = 2.0 * var;

  double e0 = solver::twisted_tube_oracle(0.0, pot, L, n_basis, 1).spectrum.eigenvalues[0];
  std::vector<double> rates = {0.05, 0.025, 0.0125}, dev;
  for (double s0 : rates) {
    double de =
        solver::twisted_tube_oracle(s0, pot, L, n_basis, 1).spectrum.eigenvalues[0] - e0;
    double model = coeff * s0 * s0;
    dev.push_back(std::abs(de - model) / model);
    std::printf("  rate %.4f: shift %.6e vs quadratic model %.6e (off %.3f%%)\n", s0, de, model,
                100 * dev.back());
  }
  bool shrinking = dev[0] > dev[1] && dev[1] > dev[2];
  std::printf("  predicted coefficient 2*variance = %.6f, smallest-rate deviation %.3f%% "
              "(tol %.0f%%)\n",
              coeff, 100 * dev.back(), 100 * kFinalTol);
  return verdict(5, "twisted tube quadratic response", shrinking && dev.back() <= kFinalTol);
}

bool criterion_6() {
  constexpr double kLevelTol = 1e-3;
  constexpr double kShiftTol = 1e-10;
  const int n = 512, k = 11;
  const double L = 2.0 * M_PI, lam_mean = 0.5, S = 0.37;

  auto flux_levels = [&](double a) {
    effective::EffectiveField f;
    f.m = 1;
    f.d = 2;
    f.k = 1;
    f.hbar = 1.0;
    f.periodic = true;
    f.length = L;
    effective::PotentialBreakdown pb;
    pb.twist_variance = Eigen::MatrixXcd::Zero(1, 1);
    pb.curvature_coupling = Eigen::MatrixXcd::Zero(1, 1);
    pb.total = Eigen::MatrixXcd::Zero(1, 1);
    for (int i = 0; i < n; ++i) {
      f.alpha.push_back(L * i / n);
      f.well.push_back(pb);
      f.gauge.push_back(Eigen::MatrixXcd::Constant(1, 1, a));
    }
    return solver::eigensolve_operator(solver::discretize_tangential(f, n, true), k, false)
        .eigenvalues;
  };

  double a = 2.0 * S * lam_mean;
  std::vector<double> got = flux_levels(a);
  std::vector<double> expect;
  for (int j = -8; j <= 8; ++j) expect.push_back(0.5 * std::pow(2.0 * M_PI * j / L + a, 2));
  std::sort(expect.begin(), expect.end());
  expect.resize(k);

  double worst = 0.0;
  for (int i = 0; i < k; ++i)
    worst = std::max(worst, std::abs(got[i] - expect[i]) / std::max(std::abs(expect[i]), 1e-3));
  std::printf("  %d ring levels vs closed form: worst relative offset %.3e (tol %.0e)\n", k,
              worst, kLevelTol);

  std::vector<double> shifted = flux_levels(a + 2.0 * M_PI / L);
  double worst_shift = 0.0;
  for (int i = 0; i < k; ++i)
    worst_shift = std::max(worst_shift,
                           std::abs(got[i] - shifted[i]) / std::max(std::abs(got[i]), 1e-3));
  std::printf("  one flux quantum added: worst relative level shift %.3e (tol %.0e)\n",
              worst_shift, kShiftTol);
  return verdict(6, "flux identity on a ring", worst <= kLevelTol && worst_shift <= kShiftTol);
}

bool criterion_7() {
  std::vector<CheckResult> items = run_identity_checks();
  bool all = true;
  for (const CheckResult& c : items) {
    std::printf("  %-28s residual %.3e  tol %.0e  %s\n", c.name.c_str(), c.residual, c.tol,
                c.pass ? "pass" : "FAIL");
    all = all && c.pass;
  }
  for (const CheckResult& c : items)
    if (!c.pass) std::printf("  note on %s: %s\n", c.name.c_str(), c.detail.c_str());
  return verdict(7, "identity suite", all);
}

bool criterion_8() {
  constexpr double kTol = 1e-8;
  const double L = 2.0 * M_PI;
  transverse::ModeSet modes = transverse::disk_modes(1.0, 1, 1, 1.0);
  auto theta = [L](double a) { return 2.0 * M_PI * a / L + 0.4 * std::sin(2.0 * M_PI * a / L); };
  double res = solver::frame_independence_residual(modes, L, theta, 512, 6);
  std::printf("  spectra under still vs winding frame differ by %.3e (tol %.0e)\n", res, kTol);
  return verdict(8, "frame independence of round sections", res <= kTol);
}

bool criterion_9() {
  constexpr double kSphereTol = 1e-8;
  constexpr double kCylinderTol = 1e-6;
  constexpr double kIdentityTol = 1e-12;

  json sphere = {{"schema_version", 1},
                 {"name", "sphere"},
                 {"geometry", {{"family", "sphere"}, {"rho", 1.2}}},
                 {"transverse", {{"kind", "harmonic"}, {"freqs", {1.0}}}}};
  std::string out_s = fresh_dir("sphere");
  run_command(sphere.dump(), "effective", out_s);
  CsvTable ts = read_csv(out_s + "/effective_field.csv");
  double sphere_vex = 0.0, sphere_gauge = 0.0;
  for (double v : column(ts, "Vex")) sphere_vex = std::max(sphere_vex, std::abs(v));
  for (double g : column(ts, "gauge")) sphere_gauge = std::max(sphere_gauge, std::abs(g));

  json cyl = {{"schema_version", 1},
              {"name", "cylinder"},
              {"geometry", {{"family", "cylinder"}, {"rho", 1.3}}},
              {"transverse", {{"kind", "harmonic"}, {"freqs", {1.0}}}}};
  std::string out_c = fresh_dir("cylinder");
  run_command(cyl.dump(), "effective", out_c);
  CsvTable tc = read_csv(out_c + "/effective_field.csv");
  double cyl_worst = 0.0, cyl_gauge = 0.0;
  const double cyl_expect = -1.0 / (8.0 * 1.3 * 1.3);
  for (double v : column(tc, "Vex"))
    cyl_worst = std::max(cyl_worst, std::abs(v - cyl_expect) / std::abs(cyl_expect));
  for (double g : column(tc, "gauge")) cyl_gauge = std::max(cyl_gauge, std::abs(g));

  // two-normal product embedding: the well must stay a multiple of the
  // identity and the gauge blocks exactly zero for several stacked modes
  geom::AmbientSpace space;
  space.dim = 4;
  geom::EmbeddingPatch patch = geom::flat_torus4_patch(1.0, 1.5);
  transverse::ModeSet modes =
      transverse::harmonic_modes({1.0, 1.0}, {{0, 0}, {1, 0}, {0, 1}}, 1.0);
  double off = 0.0, spread = 0.0, gauge = 0.0;
  for (double u : {0.3, 2.0})
    for (double v : {0.5, 4.1}) {
      Eigen::VectorXd p(2);
      p << u, v;
      geom::EmbeddingGeometry eg = geom::embed_geometry(space, patch, p);
      effective::GeometrySample gs;
      gs.scalars = geom::curvature_scalars(eg);
      gs.twist = Tensor3(2, 2, 2);
      gs.normal_riemann = effective::normal_block(eg.R, 2);
      effective::PotentialBreakdown pb = effective::geometric_potential(gs, modes);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (i != j) off = std::max(off, std::abs(pb.total(i, j)));
      for (int i = 0; i < 3; ++i)
        spread = std::max(spread, std::abs(pb.total(i, i) - pb.total(0, 0)));
      for (int dir = 0; dir < 2; ++dir)
        gauge = std::max(gauge,
                         effective::gauge_block(gs.twist, modes, dir).cwiseAbs().maxCoeff());
    }

  std::printf("  sphere: max |well| %.3e (tol %.0e), max |gauge| %.3e (exact zero)\n", sphere_vex,
              kSphereTol, sphere_gauge);
  std::printf("  cylinder: worst relative well offset %.3e (tol %.0e), max |gauge| %.3e\n",
              cyl_worst, kCylinderTol, cyl_gauge);
  std::printf("  flat torus: off-diagonal %.3e, diagonal spread %.3e (tol %.0e), gauge %.3e\n",
              off, spread, kIdentityTol, gauge);
  return verdict(9, "codimension-one separation",
                 sphere_vex <= kSphereTol && sphere_gauge == 0.0 && cyl_worst <= kCylinderTol &&
                     cyl_gauge == 0.0 && off <= kIdentityTol && spread <= kIdentityTol &&
                     gauge == 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "criterion number (1-9); 0 runs all")
      ->check(CLI::Range(0, 9));
  CLI11_PARSE(app, argc, argv);

  bool (*table[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                       criterion_6, criterion_7, criterion_8, criterion_9};
  int failures = 0;
  try {
    if (criterion == 0) {
      for (auto* fn : table)
        if (!fn()) ++failures;
    } else {
      if (!table[criterion - 1]()) ++failures;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
