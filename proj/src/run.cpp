#include "tubular/run.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "tubular/checks.hpp"
#include "tubular/effective.hpp"
#include "tubular/eigensolve.hpp"
#include "tubular/errors.hpp"
#include "tubular/framing.hpp"
#include "tubular/geometry.hpp"
#include "tubular/io.hpp"
#include "tubular/solver.hpp"
#include "tubular/transverse.hpp"

namespace tubular::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    auto t1 = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

std::vector<std::string> convention_comments(double hbar) {
  return {
      "angular momentum: Lambda(mu,nu) = (u_mu pi_nu - u_nu pi_mu)/2, half of L_z for two "
      "normals",
      "twist sign: S = <E1, dE2/dalpha>",
      "curvature ordering: R(a,b,c,d) = <E_a, R(E_c,E_d) E_b>, normal indices first",
      "hbar = " + format_double(hbar),
  };
}

json conventions_json(double hbar) {
  return json{
      {"angular_momentum",
       "Lambda(mu,nu) = (u_mu pi_nu - u_nu pi_mu)/2, half of L_z for two normals"},
      {"twist_sign", "S = <E1, dE2/dalpha>"},
      {"curvature_ordering", "R(a,b,c,d) = <E_a, R(E_c,E_d) E_b>, normal indices first"},
      {"hbar", hbar},
  };
}

json echo_scenario(const Scenario& s) {
  const GeometrySpec& g = s.geometry;
  json jg{{"family", g.family}};
  if (g.family == "circle" || g.family == "sphere" || g.family == "cylinder") jg["rho"] = g.rho;
  if (g.family == "helix" || g.family == "ellipse") {
    jg["a"] = g.a;
    jg["b"] = g.b;
  }
  if (g.family == "line") jg["length"] = g.length;
  if (g.family == "arc_line") {
    jg["rho"] = g.rho;
    jg["angle"] = g.angle;
    jg["lead"] = g.lead;
  }
  if (g.family == "flat_torus4") {
    jg["R1"] = g.R1;
    jg["R2"] = g.R2;
  }
  if (g.family == "samples") {
    jg["path"] = g.path;
    jg["closed"] = g.closed;
  }

  json jf{{"profile", s.frame.profile}};
  if (s.frame.profile == "constant_rate") {
    jf["twist"] = s.frame.twist;
    jf["theta0"] = s.frame.theta0;
  }
  if (s.frame.profile == "rotation") {
    jf["winding"] = s.frame.winding;
    jf["wobble"] = s.frame.wobble;
  }
  if (s.frame.profile == "table") jf["path"] = s.frame.path;

  const TransverseSpec& t = s.transverse;
  json jt{{"kind", t.kind}};
  if (t.kind == "harmonic") jt["freqs"] = t.freqs;
  if (t.kind == "disk") jt["radius"] = t.radius;
  if (t.kind == "polygon") {
    json verts = json::array();
    for (const auto& v : t.vertices) verts.push_back({v[0], v[1]});
    jt["vertices"] = verts;
    jt["n_grid"] = t.n_grid;
  }

  json jm = json::object();
  if (t.kind == "harmonic") jm["occupations"] = s.modes.occupations;
  if (t.kind == "disk") {
    jm["m_quantum"] = s.modes.m_quantum;
    jm["radial_index"] = s.modes.radial_index;
  }
  if (t.kind == "polygon") {
    jm["index0"] = s.modes.index0;
    jm["k"] = s.modes.k;
  }

  json js{{"n_grid", s.solver.n_grid}, {"bc", s.solver.bc},      {"k_eigs", s.solver.k_eigs},
          {"n_alpha", s.solver.n_alpha}, {"n_u", s.solver.n_u}};
  if (!s.solver.eps_list.empty()) js["eps_list"] = s.solver.eps_list;

  return json{{"schema_version", s.schema_version},
              {"name", s.name},
              {"geometry", jg},
              {"frame", jf},
              {"transverse", jt},
              {"modes", jm},
              {"solver", js},
              {"constants", json{{"hbar", s.hbar}}},
              {"output", s.output},
              {"seed", s.seed}};
}

json finite_or_tag(double v) {
  if (std::isfinite(v)) return json(v);
  return json(v > 0 ? "inf" : "-inf");
}

std::vector<double> column_of(const CsvTable& t, const std::string& name,
                              const std::string& path) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end())
    throw ValidationError(path + ": missing column \"" + name + "\"");
  size_t c = it - t.header.begin();
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) out.push_back(std::stod(row.at(c)));
  return out;
}

geom::CurveGeometry build_curve(const Scenario& s) {
  const GeometrySpec& g = s.geometry;
  const int n = s.solver.n_grid;
  if (g.family == "samples") {
    CsvTable t = read_csv(g.path);
    std::vector<double> a = column_of(t, "alpha", g.path);
    std::vector<double> x = column_of(t, "x", g.path);
    std::vector<double> y = column_of(t, "y", g.path);
    std::vector<double> z = column_of(t, "z", g.path);
    std::vector<geom::Vector3d> pts(a.size());
    for (size_t i = 0; i < a.size(); ++i) pts[i] = geom::Vector3d(x[i], y[i], z[i]);
    return geom::curve_from_samples(a, pts, g.closed);
  }
  if (g.family == "arc_line") {
    geom::PlanarCurve pc = geom::planar_arc_line(g.rho, g.angle, g.lead);
    auto map = [pc](double a) {
      Eigen::Vector2d v = pc.x(a);
      return geom::Vector3d(v(0), v(1), 0.0);
    };
    return geom::arclength_reparameterize(map, 0.0, pc.length, n, false);
  }
  geom::CurveFamily fam = g.family == "circle"  ? geom::circle3(g.rho)
                          : g.family == "helix" ? geom::helix3(g.a, g.b)
                          : g.family == "line"  ? geom::line3(g.length)
                                                : geom::ellipse3(g.a, g.b);
  return geom::arclength_reparameterize(fam.map, fam.s0, fam.s1, n, fam.closed);
}

framing::CurveFrame build_frame(const Scenario& s, const geom::CurveGeometry& curve) {
  const FrameSpec& f = s.frame;
  if (f.profile == "constant_rate")
    return framing::constant_rate_frame(curve, f.twist, f.theta0);
  if (f.profile == "rotation") {
    const double L = curve.length;
    const int w = f.winding;
    const double amp = f.wobble;
    return framing::rotation_profile_frame(curve, [L, w, amp](double a) {
      return 2.0 * M_PI * w * a / L + amp * std::sin(2.0 * M_PI * a / L);
    });
  }
  if (f.profile == "table") {
    CsvTable t = read_csv(f.path);
    std::vector<double> a = column_of(t, "alpha", f.path);
    std::vector<std::array<geom::Vector3d, 2>> frames(a.size());
    const char* cols[2][3] = {{"e1x", "e1y", "e1z"}, {"e2x", "e2y", "e2z"}};
    for (int e = 0; e < 2; ++e) {
      std::vector<double> cx = column_of(t, cols[e][0], f.path);
      std::vector<double> cy = column_of(t, cols[e][1], f.path);
      std::vector<double> cz = column_of(t, cols[e][2], f.path);
      for (size_t i = 0; i < a.size(); ++i)
        frames[i][e] = geom::Vector3d(cx[i], cy[i], cz[i]);
    }
    return framing::frame_from_table(curve, a, frames);
  }
  return framing::frenet_aligned_frame(curve);
}

transverse::ModeSet build_modes(const Scenario& s) {
  const TransverseSpec& t = s.transverse;
  if (t.kind == "harmonic")
    return transverse::harmonic_modes(t.freqs, s.modes.occupations, s.hbar);
  if (t.kind == "disk")
    return transverse::disk_modes(t.radius, s.modes.m_quantum, s.modes.radial_index, s.hbar);
  if (t.kind == "polygon") {
    std::vector<Eigen::Vector2d> verts;
    verts.reserve(t.vertices.size());
    for (const auto& v : t.vertices) verts.emplace_back(v[0], v[1]);
    transverse::TransversePotential pot = transverse::polygon_potential(verts, s.hbar);
    transverse::GridSpec spec;
    spec.n = t.n_grid;
    spec.index0 = s.modes.index0;
    return transverse::grid_modes(pot, spec, s.modes.k);
  }
  transverse::ModeSet m = transverse::harmonic_modes({1.0}, {{0}}, s.hbar);
  m.E_perp = 0.0;  // the hard-wall zero point depends on the width, fixed only per run
  m.labels = {"interval"};
  return m;
}

std::vector<effective::GeometrySample> flat_normal_samples(const std::vector<double>& kappa) {
  std::vector<effective::GeometrySample> out(kappa.size());
  for (size_t i = 0; i < kappa.size(); ++i) {
    out[i].scalars.Tsq = kappa[i] * kappa[i];
    out[i].scalars.Msq = kappa[i] * kappa[i];
    out[i].twist = Tensor3(1, 1, 1);
    out[i].normal_riemann = Tensor4(1, 1, 1, 1);
  }
  return out;
}

struct CurveRun {
  geom::CurveGeometry curve;
  std::vector<double> alpha, kappa, twist;
  transverse::ModeSet modes;
  effective::EffectiveField field;
  double twist_raw_residual = 0.0;
  bool periodic = true;
};

CurveRun curve_pipeline(const Scenario& s) {
  CurveRun r;
  r.curve = build_curve(s);
  r.periodic = s.solver.bc == "auto" ? r.curve.closed : s.solver.bc == "periodic";
  const size_t n = r.curve.samples.size();
  r.alpha.resize(n);
  r.kappa.resize(n);
  for (size_t i = 0; i < n; ++i) {
    r.alpha[i] = r.curve.samples[i].alpha;
    r.kappa[i] = r.curve.samples[i].kappa;
  }
  r.modes = build_modes(s);
  if (r.modes.d == 2) {
    const FrameSpec& f = s.frame;
    if (f.profile == "constant_rate" || f.profile == "rotation") {
      // rotation against the sampled normal pair need not close around a loop,
      // so measure the base twist and add the exact profile derivative
      framing::CurveFrame base = framing::frenet_aligned_frame(r.curve);
      r.twist = framing::potential_twist(r.curve, base, &r.twist_raw_residual);
      const double L = r.curve.length;
      for (size_t i = 0; i < n; ++i) {
        double dtheta = f.profile == "constant_rate"
                            ? f.twist
                            : 2.0 * M_PI * f.winding / L +
                                  f.wobble * (2.0 * M_PI / L) *
                                      std::cos(2.0 * M_PI * r.alpha[i] / L);
        r.twist[i] -= dtheta;
      }
    } else {
      framing::CurveFrame frame = build_frame(s, r.curve);
      r.twist = framing::potential_twist(r.curve, frame, &r.twist_raw_residual);
    }
  } else {
    r.twist.assign(n, 0.0);
  }
  std::vector<effective::GeometrySample> samples =
      r.modes.d == 2 ? effective::curve_samples(r.kappa, r.twist)
                     : flat_normal_samples(r.kappa);
  r.field = effective::assemble_field(samples, r.modes, r.alpha, r.periodic, r.curve.length);
  return r;
}

struct SurfacePoint {
  double u = 0, v = 0;
  geom::CurvatureScalars sc;
  effective::PotentialBreakdown pb;
  double gauge_abs = 0;
};

struct SurfaceRun {
  int d = 1;
  std::vector<SurfacePoint> pts;
  transverse::ModeSet modes;
  double twist_measured = 0.0;  // finite-difference cross-check of the aligned frame
  int nu = 0, nv = 0;
  double hu = 0, hv = 0;
  effective::EffectiveField field;  // flat torus only
  bool has_field = false;
};

SurfaceRun surface_pipeline(const Scenario& s, bool with_field) {
  const GeometrySpec& g = s.geometry;
  SurfaceRun r;
  geom::AmbientSpace space;
  geom::EmbeddingPatch patch;
  if (g.family == "sphere") {
    space.dim = 3;
    patch = geom::sphere_patch(g.rho);
  } else if (g.family == "cylinder") {
    space.dim = 3;
    patch = geom::cylinder_patch(g.rho);
  } else {
    space.dim = 4;
    patch = geom::flat_torus4_patch(g.R1, g.R2);
  }
  r.d = g.family == "flat_torus4" ? 2 : 1;
  r.modes = build_modes(s);

  std::vector<double> us, vs;
  if (g.family == "sphere") {
    // interior band, away from the coordinate poles
    for (int i = 0; i < 8; ++i) us.push_back(M_PI * (0.25 + 0.5 * i / 7.0));
    for (int j = 0; j < 8; ++j) vs.push_back(0.3 + (2 * M_PI - 0.6) * j / 7.0);
  } else if (g.family == "cylinder") {
    for (int i = 0; i < 8; ++i) us.push_back(-1.0 + 2.0 * i / 7.0);
    for (int j = 0; j < 8; ++j) vs.push_back(2 * M_PI * j / 8.0);
  } else {
    r.nu = r.nv = std::min(s.solver.n_grid, 24);
    r.hu = 2 * M_PI * g.R1 / r.nu;
    r.hv = 2 * M_PI * g.R2 / r.nv;
    for (int i = 0; i < r.nu; ++i) us.push_back(i * r.hu);
    for (int j = 0; j < r.nv; ++j) vs.push_back(j * r.hv);
  }

  std::vector<effective::GeometrySample> fsamples;
  for (double u : us)
    for (double v : vs) {
      Eigen::VectorXd p(2);
      p << u, v;
      geom::EmbeddingGeometry eg = geom::embed_geometry(space, patch, p);
      effective::GeometrySample gs;
      gs.scalars = geom::curvature_scalars(eg);
      // the aligned normal frame of these product patches carries no twist
      gs.twist = Tensor3(r.d, r.d, 2);
      gs.normal_riemann = effective::normal_block(eg.R, r.d);
      SurfacePoint pt;
      pt.u = u;
      pt.v = v;
      pt.sc = gs.scalars;
      pt.pb = effective::geometric_potential(gs, r.modes);
      for (int dir = 0; dir < 2; ++dir)
        pt.gauge_abs = std::max(
            pt.gauge_abs,
            effective::gauge_block(gs.twist, r.modes, dir).cwiseAbs().maxCoeff());
      r.pts.push_back(pt);
      if (with_field && r.d == 2) fsamples.push_back(gs);
    }

  if (r.d == 2) {
    // finite-difference route to the same twist, recorded as a residual
    framing::FrameField aligned = [&space, &patch](const Eigen::VectorXd& p) {
      std::vector<Eigen::VectorXd> tang, norm;
      geom::build_frames(space, patch, p, tang, norm);
      return norm;
    };
    Eigen::VectorXd probe(2);
    probe << 0.7, 1.3;
    for (int dir = 0; dir < 2; ++dir) {
      Eigen::MatrixXd S =
          framing::potential_twist_surface(space, patch, aligned, probe, dir);
      r.twist_measured = std::max(r.twist_measured, S.cwiseAbs().maxCoeff());
    }
  }

  if (with_field && r.d == 2) {
    r.field = effective::assemble_field_rect(fsamples, r.modes, r.nu, r.nv, r.hu, r.hv, true);
    r.has_field = true;
  }
  return r;
}

CsvTable curve_table(const CurveRun& r, double hbar) {
  CsvTable t;
  t.comments = convention_comments(hbar);
  t.header = {"alpha", "x", "y", "z", "kappa", "tau", "S"};
  for (size_t i = 0; i < r.curve.samples.size(); ++i) {
    const geom::CurveSample& cs = r.curve.samples[i];
    t.rows.push_back({format_double(cs.alpha), format_double(cs.x(0)), format_double(cs.x(1)),
                      format_double(cs.x(2)), format_double(cs.kappa),
                      format_double(cs.tau_defined ? cs.tau : 0.0),
                      format_double(r.twist[i])});
  }
  return t;
}

CsvTable modes_table(const transverse::ModeSet& m, double hbar) {
  CsvTable t;
  t.comments = convention_comments(hbar);
  t.header = {"index", "energy", "label"};
  for (int i = 0; i < m.k; ++i)
    t.rows.push_back({std::to_string(i), format_double(m.energies[i]),
                      i < static_cast<int>(m.labels.size()) ? m.labels[i] : ""});
  return t;
}

CsvTable field_table_curve(const CurveRun& r, double hbar) {
  CsvTable t;
  t.comments = convention_comments(hbar);
  t.header = {"alpha",          "kappa",           "S",
              "curvature_well", "ambient_curvature", "twist_variance",
              "curvature_coupling", "Vex", "gauge"};
  for (int p = 0; p < r.field.points(); ++p) {
    const effective::PotentialBreakdown& pb = r.field.well[p];
    t.rows.push_back({format_double(r.alpha[p]), format_double(r.kappa[p]),
                      format_double(r.twist[p]), format_double(pb.curvature_well),
                      format_double(pb.ambient_curvature),
                      format_double(pb.twist_variance(0, 0).real()),
                      format_double(pb.curvature_coupling(0, 0).real()),
                      format_double(pb.total(0, 0).real()),
                      format_double(r.field.gauge_at(p, 0).cwiseAbs().maxCoeff())});
  }
  return t;
}

CsvTable field_table_surface(const SurfaceRun& r, double hbar) {
  CsvTable t;
  t.comments = convention_comments(hbar);
  t.header = {"u", "v", "Tsq", "Msq", "R_hat", "Vex", "gauge"};
  for (const SurfacePoint& p : r.pts)
    t.rows.push_back({format_double(p.u), format_double(p.v), format_double(p.sc.Tsq),
                      format_double(p.sc.Msq), format_double(p.sc.R_hat),
                      format_double(p.pb.total(0, 0).real()), format_double(p.gauge_abs)});
  return t;
}

CsvTable spectrum_table(const Spectrum& sp, double hbar) {
  CsvTable t;
  t.comments = convention_comments(hbar);
  t.header = {"index", "eigenvalue", "residual"};
  for (size_t i = 0; i < sp.eigenvalues.size(); ++i)
    t.rows.push_back({std::to_string(i), format_double(sp.eigenvalues[i]),
                      format_double(i < sp.residuals.size() ? sp.residuals[i] : 0.0)});
  return t;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

void spectrum_results(const CurveRun& r, const Spectrum& sp, json& results) {
  json eig = json::array();
  for (double e : sp.eigenvalues) eig.push_back(e);
  results["eigenvalues"] = eig;
  results["E_perp"] = r.modes.E_perp;
  results["method"] = sp.method;
  if (r.modes.pairs() >= 1) {
    Eigen::MatrixXcd lam = r.modes.lambda(0, 1);
    json lm = json::array();
    for (int i = 0; i < r.modes.k; ++i) lm.push_back(lam(i, i).real());
    results["lambda_mean"] = lm;
    double tmean = mean_of(r.twist);
    results["twist_mean"] = tmean;
    results["gauge_coefficient"] = 2.0 * tmean * lam(0, 0).real();
  }
}

double worst_herm(const effective::EffectiveField& f) {
  double w = 0;
  for (const auto& pb : f.well) w = std::max(w, pb.herm_residual);
  return w;
}

geom::PlanarCurve planar_of(const GeometrySpec& g) {
  if (g.family == "circle") return geom::planar_circle(g.rho);
  if (g.family == "line") return geom::planar_segment(g.length);
  return geom::planar_arc_line(g.rho, g.angle, g.lead);
}

}  // namespace

int run_checks(const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<CheckResult> checks = run_identity_checks();

  CsvTable t;
  t.comments = convention_comments(1.0);
  t.header = {"name", "residual", "tol", "pass", "detail"};
  int failed = 0;
  json items = json::array();
  for (const CheckResult& c : checks) {
    t.rows.push_back({c.name, format_double(c.residual), format_double(c.tol),
                      c.pass ? "1" : "0", c.detail});
    if (!c.pass) ++failed;
    items.push_back(json{{"name", c.name},
                         {"residual", c.residual},
                         {"tol", c.tol},
                         {"pass", c.pass},
                         {"detail", c.detail}});
  }
  write_csv((fs::path(out_dir) / "checks.csv").string(), t);

  json meta;
  meta["command"] = "check";
  meta["conventions"] = conventions_json(1.0);
  meta["results"] = json{{"checks", checks.size()}, {"failed", failed}, {"items", items}};
  std::ofstream out(fs::path(out_dir) / "metadata.json");
  out << meta.dump(2) << '\n';
  return failed == 0 ? 0 : 1;
}

int run_scenario(const Scenario& s, const RunOptions& opt) {
  if (opt.threads > 0) Eigen::setNbThreads(opt.threads);
  const std::string out_dir = opt.out_override.empty() ? s.output : opt.out_override;
  fs::create_directories(out_dir);
  const std::uint64_t seed = opt.seed_override.value_or(s.seed);
  auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  json meta;
  meta["command"] = opt.command;
  meta["name"] = s.name;
  meta["seed"] = seed;
  meta["conventions"] = conventions_json(s.hbar);
  meta["scenario"] = echo_scenario(s);
  json results = json::object();
  json residuals = json::object();
  Timer timer;

  const bool surface = surface_family(s.geometry.family);

  if (opt.command == "curve") {
    if (surface) throw ValidationError("the curve command needs a curve geometry");
    CurveRun r = curve_pipeline(s);
    write_csv(path("curve.csv"), curve_table(r, s.hbar));
    results["length"] = r.curve.length;
    results["closed"] = r.curve.closed;
    results["kappa_max"] = *std::max_element(r.kappa.begin(), r.kappa.end());
    results["twist_mean"] = mean_of(r.twist);
    residuals["twist_antisymmetry"] = r.twist_raw_residual;
  } else if (opt.command == "modes") {
    transverse::ModeSet m = build_modes(s);
    write_csv(path("modes.csv"), modes_table(m, s.hbar));
    results["k"] = m.k;
    results["E_perp"] = m.E_perp;
    json en = json::array();
    for (double e : m.energies) en.push_back(e);
    results["energies"] = en;
  } else if (opt.command == "effective") {
    if (surface) {
      SurfaceRun r = surface_pipeline(s, false);
      write_csv(path("effective_field.csv"), field_table_surface(r, s.hbar));
      double well_min = 1e300, well_max = -1e300, gauge_max = 0;
      for (const auto& p : r.pts) {
        well_min = std::min(well_min, p.pb.total(0, 0).real());
        well_max = std::max(well_max, p.pb.total(0, 0).real());
        gauge_max = std::max(gauge_max, p.gauge_abs);
      }
      results["well_min"] = well_min;
      results["well_max"] = well_max;
      results["gauge_max"] = gauge_max;
      residuals["aligned_frame_twist_fd"] = r.twist_measured;
    } else {
      CurveRun r = curve_pipeline(s);
      write_csv(path("effective_field.csv"), field_table_curve(r, s.hbar));
      results["E_perp"] = r.modes.E_perp;
      residuals["twist_antisymmetry"] = r.twist_raw_residual;
      residuals["well_hermiticity"] = worst_herm(r.field);
    }
  } else if (opt.command == "spectrum") {
    if (surface && s.geometry.family != "flat_torus4")
      throw ValidationError(
          "spectra are assembled for curves and the flat torus; curved surface patches only "
          "support the effective command");
    if (surface) {
      SurfaceRun r = surface_pipeline(s, true);
      write_csv(path("effective_field.csv"), field_table_surface(r, s.hbar));
      solver::DiscretizedOperator op =
          solver::discretize_tangential(r.field, r.field.points(), true);
      Spectrum sp = solver::eigensolve_operator(op, std::min(s.solver.k_eigs, op.dim), false,
                                                static_cast<unsigned>(seed));
      write_csv(path("spectrum.csv"), spectrum_table(sp, s.hbar));
      json eig = json::array();
      for (double e : sp.eigenvalues) eig.push_back(e);
      results["eigenvalues"] = eig;
      results["E_perp"] = r.modes.E_perp;
      results["method"] = sp.method;
      residuals["aligned_frame_twist_fd"] = r.twist_measured;
      residuals["well_hermiticity"] = worst_herm(r.field);
    } else {
      CurveRun r = curve_pipeline(s);
      write_csv(path("effective_field.csv"), field_table_curve(r, s.hbar));
      solver::DiscretizedOperator op =
          solver::discretize_tangential(r.field, r.field.points(), r.periodic);
      Spectrum sp = solver::eigensolve_operator(op, std::min(s.solver.k_eigs, op.dim), false,
                                                static_cast<unsigned>(seed));
      write_csv(path("spectrum.csv"), spectrum_table(sp, s.hbar));
      spectrum_results(r, sp, results);
      residuals["twist_antisymmetry"] = r.twist_raw_residual;
      residuals["well_hermiticity"] = worst_herm(r.field);
      if (!sp.residuals.empty())
        residuals["eigen_certificate"] =
            *std::max_element(sp.residuals.begin(), sp.residuals.end());
    }
  } else if (opt.command == "converge") {
    if (!planar_family(s.geometry.family))
      throw ValidationError(
          "geometry.family: width studies run on planar curves (circle, line, arc_line)");
    if (s.solver.eps_list.empty())
      throw ValidationError("solver.eps_list: the converge command needs a width list");

    geom::PlanarCurve pc = planar_of(s.geometry);
    const int na = s.solver.n_alpha;
    const double L = pc.length;
    const double ha = pc.closed ? L / na : L / (na + 1);
    std::vector<double> alpha(na), kap(na);
    for (int i = 0; i < na; ++i) {
      alpha[i] = pc.closed ? i * ha : (i + 1) * ha;
      // same per-cell curvature average as the strip assembly, so the
      // comparison isolates the width dependence from the grid treatment
      kap[i] = pc.mean_kappa ? pc.mean_kappa(alpha[i] - ha / 2, alpha[i] + ha / 2)
                             : pc.kappa(alpha[i]);
    }
    transverse::ModeSet m = transverse::harmonic_modes({1.0}, {{0}}, s.hbar);
    m.E_perp = 0.0;
    effective::EffectiveField field =
        effective::assemble_field(flat_normal_samples(kap), m, alpha, pc.closed, L);
    double e_eff = solver::eigensolve_operator(
                       solver::discretize_tangential(field, na, pc.closed), 1, false,
                       static_cast<unsigned>(seed))
                       .eigenvalues[0];

    auto oracle = [&](double eps) {
      solver::StripGrid grid;
      grid.n_alpha = na;
      grid.n_u = s.solver.n_u;
      solver::StripResult sr = solver::strip_oracle(pc, eps, grid, 1, s.hbar);
      return std::pair<double, double>(sr.E_full, sr.E_perp_discrete);
    };
    solver::ConvergenceReport rep =
        solver::epsilon_convergence(oracle, s.solver.eps_list, e_eff);

    CsvTable t;
    t.comments = convention_comments(s.hbar);
    t.header = {"epsilon", "E_full", "E_perp", "E_residual", "E_effective", "abs_error"};
    bool monotone = true;
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      const solver::ConvergenceRow& row = rep.rows[i];
      t.rows.push_back({format_double(row.epsilon), format_double(row.E_full),
                        format_double(row.E_perp), format_double(row.E_residual),
                        format_double(row.E_effective), format_double(row.abs_error)});
      if (i > 0 && row.abs_error >= rep.rows[i - 1].abs_error) monotone = false;
    }
    write_csv(path("convergence.csv"), t);
    results["fitted_order"] = finite_or_tag(rep.fitted_order);
    results["E_effective"] = e_eff;
    results["monotone_abs_error"] = monotone;
  } else {
    throw ValidationError("unknown command \"" + opt.command + "\"");
  }

  json timings;
  timings["total_s"] = timer.lap();
  meta["results"] = results;
  meta["residuals"] = residuals;
  meta["timings"] = timings;
  std::ofstream out(fs::path(out_dir) / "metadata.json");
  out << meta.dump(2) << '\n';
  return 0;
}

}  // namespace tubular::cli
