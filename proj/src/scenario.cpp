#include "tubular/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tubular/errors.hpp"
#include "tubular/numerics.hpp"

namespace tubular::cli {

namespace {

using nlohmann::json;

bool known_family(const std::string& f) {
  return curve_family(f) || surface_family(f) || f == "samples";
}

// Collects every violation so one run reports the whole story.
struct Problems {
  std::vector<std::string> items;

  void add(std::string m) { items.push_back(std::move(m)); }

  void finish() const {
    if (items.empty()) return;
    std::ostringstream out;
    out << "scenario validation failed:";
    for (const auto& m : items) out << "\n  - " << m;
    throw ValidationError(out.str());
  }
};

void check_keys(const json& obj, const std::string& section,
                const std::vector<std::string>& allowed, Problems& p) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
    int best = 1 << 20;
    std::string guess;
    for (const auto& a : allowed) {
      int d = levenshtein(key, a);
      if (d < best) {
        best = d;
        guess = a;
      }
    }
    std::string m = section + ": unknown key \"" + key + "\"";
    if (best <= 2) m += "; did you mean \"" + guess + "\"?";
    p.add(m);
  }
}

double num_or(const json& o, const std::string& sec, const char* key, double def, Problems& p) {
  if (!o.contains(key)) return def;
  const json& v = o.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    p.add(sec + "." + key + ": expected a finite number");
    return def;
  }
  return v.get<double>();
}

int int_or(const json& o, const std::string& sec, const char* key, int def, Problems& p) {
  if (!o.contains(key)) return def;
  const json& v = o.at(key);
  if (!v.is_number_integer()) {
    p.add(sec + "." + key + ": expected an integer");
    return def;
  }
  return v.get<int>();
}

std::string str_or(const json& o, const std::string& sec, const char* key, std::string def,
                   Problems& p) {
  if (!o.contains(key)) return def;
  const json& v = o.at(key);
  if (!v.is_string()) {
    p.add(sec + "." + key + ": expected a string");
    return def;
  }
  return v.get<std::string>();
}

std::string existing_file(const json& o, const std::string& sec, Problems& p) {
  std::string path = str_or(o, sec, "path", "", p);
  if (path.empty())
    p.add(sec + ".path: required");
  else if (!std::filesystem::exists(path))
    p.add(sec + ".path: file not found: " + path);
  return path;
}

GeometrySpec parse_geometry(const json& root, Problems& p) {
  GeometrySpec g;
  if (!root.contains("geometry") || !root.at("geometry").is_object()) {
    p.add("geometry: required object");
    return g;
  }
  const json& o = root.at("geometry");
  g.family = str_or(o, "geometry", "family", "", p);
  if (!known_family(g.family)) {
    p.add("geometry.family: unknown family \"" + g.family +
          "\" (circle, helix, line, ellipse, arc_line, sphere, cylinder, flat_torus4, samples)");
    return g;
  }

  std::vector<std::string> allowed = {"family"};
  if (g.family == "circle" || g.family == "sphere" || g.family == "cylinder")
    allowed.push_back("rho");
  else if (g.family == "helix" || g.family == "ellipse")
    allowed.insert(allowed.end(), {"a", "b"});
  else if (g.family == "line")
    allowed.push_back("length");
  else if (g.family == "arc_line")
    allowed.insert(allowed.end(), {"rho", "angle", "lead"});
  else if (g.family == "flat_torus4")
    allowed.insert(allowed.end(), {"R1", "R2"});
  else if (g.family == "samples")
    allowed.insert(allowed.end(), {"path", "closed"});
  check_keys(o, "geometry", allowed, p);

  g.rho = num_or(o, "geometry", "rho", g.rho, p);
  g.a = num_or(o, "geometry", "a", g.a, p);
  g.b = num_or(o, "geometry", "b", g.b, p);
  g.angle = num_or(o, "geometry", "angle", g.angle, p);
  g.lead = num_or(o, "geometry", "lead", g.lead, p);
  g.length = num_or(o, "geometry", "length", g.length, p);
  g.R1 = num_or(o, "geometry", "R1", g.R1, p);
  g.R2 = num_or(o, "geometry", "R2", g.R2, p);

  if (o.contains("rho") && g.rho <= 0) p.add("geometry.rho: must be positive");
  if (g.family == "helix" && g.a <= 0) p.add("geometry.a: helix radius must be positive");
  if (g.family == "ellipse" && (g.a <= 0 || g.b <= 0))
    p.add("geometry.a, geometry.b: ellipse semi-axes must be positive");
  if (g.family == "line" && g.length <= 0) p.add("geometry.length: must be positive");
  if (g.family == "arc_line") {
    if (!(g.angle > 0 && g.angle <= 2 * M_PI))
      p.add("geometry.angle: must lie in (0, 2*pi]");
    if (g.lead < 0) p.add("geometry.lead: must be nonnegative");
  }
  if (g.family == "flat_torus4" && (g.R1 <= 0 || g.R2 <= 0))
    p.add("geometry.R1, geometry.R2: torus radii must be positive");
  if (g.family == "samples") {
    g.path = existing_file(o, "geometry", p);
    if (o.contains("closed")) {
      if (!o.at("closed").is_boolean())
        p.add("geometry.closed: expected true or false");
      else
        g.closed = o.at("closed").get<bool>();
    }
  }
  return g;
}

FrameSpec parse_frame(const json& root, const GeometrySpec& g, Problems& p) {
  FrameSpec f;
  if (!root.contains("frame")) return f;
  if (!root.at("frame").is_object()) {
    p.add("frame: expected an object");
    return f;
  }
  const json& o = root.at("frame");
  f.profile = str_or(o, "frame", "profile", "frenet", p);

  std::vector<std::string> allowed = {"profile"};
  if (f.profile == "constant_rate")
    allowed.insert(allowed.end(), {"twist", "theta0"});
  else if (f.profile == "rotation")
    allowed.insert(allowed.end(), {"winding", "wobble"});
  else if (f.profile == "table")
    allowed.push_back("path");
  else if (f.profile != "frenet")
    p.add("frame.profile: unknown profile \"" + f.profile +
          "\" (frenet, constant_rate, rotation, table)");
  check_keys(o, "frame", allowed, p);

  f.twist = num_or(o, "frame", "twist", 0.0, p);
  f.theta0 = num_or(o, "frame", "theta0", 0.0, p);
  f.winding = int_or(o, "frame", "winding", 1, p);
  f.wobble = num_or(o, "frame", "wobble", 0.0, p);
  if (f.profile == "table") f.path = existing_file(o, "frame", p);

  if (surface_family(g.family) && f.profile != "frenet")
    p.add("frame.profile: surface scenarios use the built-in aligned frame");
  return f;
}

TransverseSpec parse_transverse(const json& root, const GeometrySpec& g, Problems& p) {
  TransverseSpec t;
  const bool one_normal = g.family == "sphere" || g.family == "cylinder";
  if (one_normal) t.freqs = {1.0};
  if (!root.contains("transverse")) return t;
  if (!root.at("transverse").is_object()) {
    p.add("transverse: expected an object");
    return t;
  }
  const json& o = root.at("transverse");
  t.kind = str_or(o, "transverse", "kind", "harmonic", p);

  std::vector<std::string> allowed = {"kind"};
  if (t.kind == "harmonic")
    allowed.push_back("freqs");
  else if (t.kind == "disk")
    allowed.push_back("radius");
  else if (t.kind == "polygon")
    allowed.insert(allowed.end(), {"vertices", "n_grid"});
  else if (t.kind != "interval")
    p.add("transverse.kind: unknown kind \"" + t.kind +
          "\" (harmonic, disk, polygon, interval)");
  check_keys(o, "transverse", allowed, p);

  if (o.contains("freqs")) {
    const json& fr = o.at("freqs");
    if (!fr.is_array() || fr.empty()) {
      p.add("transverse.freqs: expected a nonempty array of frequencies");
    } else {
      t.freqs.clear();
      for (const auto& v : fr) {
        if (!v.is_number() || v.get<double>() <= 0) {
          p.add("transverse.freqs: frequencies must be positive numbers");
          t.freqs = {1.0, 1.0};
          break;
        }
        t.freqs.push_back(v.get<double>());
      }
    }
  }
  t.radius = num_or(o, "transverse", "radius", t.radius, p);
  if (t.kind == "disk" && t.radius <= 0) p.add("transverse.radius: must be positive");
  t.n_grid = int_or(o, "transverse", "n_grid", t.n_grid, p);
  if (t.kind == "polygon" && t.n_grid < 16) p.add("transverse.n_grid: need at least 16 points");

  if (t.kind == "polygon") {
    if (!o.contains("vertices") || !o.at("vertices").is_array() || o.at("vertices").size() < 3) {
      p.add("transverse.vertices: need at least three [x, y] pairs");
    } else {
      for (const auto& v : o.at("vertices")) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
          p.add("transverse.vertices: each vertex must be an [x, y] pair");
          break;
        }
        t.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
      }
    }
  }

  const int d_needed = one_normal ? 1 : 2;
  if (t.kind == "harmonic" && !t.freqs.empty() &&
      static_cast<int>(t.freqs.size()) != d_needed) {
    p.add(one_normal
              ? "transverse.freqs: a codimension-one surface has a single normal direction"
              : "transverse.freqs: this geometry has two normal directions; give two frequencies");
  }
  if (one_normal && t.kind != "harmonic")
    p.add("transverse.kind: a codimension-one surface takes a harmonic width only");
  if (t.kind == "interval" && !planar_family(g.family))
    p.add("transverse.kind: an interval cross-section needs a planar curve");
  return t;
}

ModeSpec parse_modes(const json& root, const TransverseSpec& t, Problems& p) {
  ModeSpec m;
  m.occupations = {std::vector<int>(t.freqs.size(), 0)};
  if (!root.contains("modes")) return m;
  if (!root.at("modes").is_object()) {
    p.add("modes: expected an object");
    return m;
  }
  const json& o = root.at("modes");

  std::vector<std::string> allowed;
  if (t.kind == "harmonic")
    allowed = {"occupations"};
  else if (t.kind == "disk")
    allowed = {"m_quantum", "radial_index"};
  else if (t.kind == "polygon")
    allowed = {"index0", "k"};
  else
    p.add("modes: an interval cross-section takes no mode selection");
  check_keys(o, "modes", allowed, p);

  if (o.contains("occupations")) {
    const json& occ = o.at("occupations");
    bool ok = occ.is_array() && !occ.empty();
    if (ok) {
      m.occupations.clear();
      for (const auto& row : occ) {
        if (!row.is_array() || row.size() != t.freqs.size()) {
          ok = false;
          break;
        }
        std::vector<int> r;
        for (const auto& v : row) {
          if (!v.is_number_integer() || v.get<int>() < 0) {
            ok = false;
            break;
          }
          r.push_back(v.get<int>());
        }
        if (!ok) break;
        m.occupations.push_back(r);
      }
    }
    if (!ok) {
      p.add("modes.occupations: expected rows of " + std::to_string(t.freqs.size()) +
            " nonnegative integers");
      m.occupations = {std::vector<int>(t.freqs.size(), 0)};
    }
  }
  m.m_quantum = int_or(o, "modes", "m_quantum", m.m_quantum, p);
  if (t.kind == "disk" && m.m_quantum < 0) p.add("modes.m_quantum: must be nonnegative");
  m.radial_index = int_or(o, "modes", "radial_index", m.radial_index, p);
  if (t.kind == "disk" && m.radial_index < 1) p.add("modes.radial_index: counts from 1");
  m.index0 = int_or(o, "modes", "index0", m.index0, p);
  if (m.index0 < 0) p.add("modes.index0: must be nonnegative");
  m.k = int_or(o, "modes", "k", m.k, p);
  if (m.k < 1) p.add("modes.k: need at least one mode");
  return m;
}

SolverSpec parse_solver(const json& root, const GeometrySpec& g, Problems& p) {
  SolverSpec s;
  if (!root.contains("solver")) return s;
  if (!root.at("solver").is_object()) {
    p.add("solver: expected an object");
    return s;
  }
  const json& o = root.at("solver");
  check_keys(o, "solver", {"n_grid", "bc", "k_eigs", "eps_list", "n_alpha", "n_u"}, p);

  s.n_grid = int_or(o, "solver", "n_grid", s.n_grid, p);
  if (s.n_grid < 8) p.add("solver.n_grid: need at least 8 points");
  s.bc = str_or(o, "solver", "bc", s.bc, p);
  if (s.bc != "auto" && s.bc != "periodic" && s.bc != "dirichlet")
    p.add("solver.bc: expected auto, periodic or dirichlet");
  s.k_eigs = int_or(o, "solver", "k_eigs", s.k_eigs, p);
  if (s.k_eigs < 1) p.add("solver.k_eigs: need at least one eigenvalue");
  s.n_alpha = int_or(o, "solver", "n_alpha", s.n_alpha, p);
  if (s.n_alpha < 8) p.add("solver.n_alpha: need at least 8 points along the strip");
  s.n_u = int_or(o, "solver", "n_u", s.n_u, p);
  if (s.n_u < 3) p.add("solver.n_u: need at least 3 points across the strip");

  if (o.contains("eps_list")) {
    const json& e = o.at("eps_list");
    if (!e.is_array() || e.size() < 3) {
      p.add("solver.eps_list: need at least three strictly decreasing widths");
    } else {
      for (const auto& v : e) {
        if (!v.is_number()) {
          p.add("solver.eps_list: widths must be numbers");
          s.eps_list.clear();
          break;
        }
        double w = v.get<double>();
        if (w <= 0) {
          p.add("solver.eps_list: widths must be positive (got " + std::to_string(w) + ")");
          s.eps_list.clear();
          break;
        }
        s.eps_list.push_back(w);
      }
      for (size_t i = 0; i + 1 < s.eps_list.size(); ++i)
        if (s.eps_list[i + 1] >= s.eps_list[i]) {
          p.add("solver.eps_list: widths must decrease strictly");
          break;
        }
    }
  }

  const bool open_curve = g.family == "line" || g.family == "arc_line" ||
                          (g.family == "helix") || (g.family == "samples" && !g.closed);
  if (s.bc == "periodic" && open_curve)
    p.add("solver.bc: this geometry is open; periodic wrap is not available");
  if (s.bc == "dirichlet" && !open_curve && curve_family(g.family))
    p.add("solver.bc: closed curves are solved with the periodic wrap");
  return s;
}

}  // namespace

bool curve_family(const std::string& f) {
  return f == "circle" || f == "helix" || f == "line" || f == "ellipse" || f == "arc_line" ||
         f == "samples";
}

bool planar_family(const std::string& f) {
  return f == "circle" || f == "line" || f == "arc_line";
}

bool surface_family(const std::string& f) {
  return f == "sphere" || f == "cylinder" || f == "flat_torus4";
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError(origin + ": top level must be an object");

  Problems p;
  check_keys(root, "scenario",
             {"schema_version", "name", "geometry", "frame", "transverse", "modes", "solver",
              "constants", "output", "seed"},
             p);

  Scenario s;
  if (!root.contains("schema_version"))
    p.add("schema_version: required (this build reads version 1)");
  else if (!root.at("schema_version").is_number_integer() ||
           root.at("schema_version").get<int>() != 1)
    p.add("schema_version: this build reads version 1 only");

  s.name = str_or(root, "scenario", "name", "", p);
  if (s.name.empty()) p.add("name: required");

  s.geometry = parse_geometry(root, p);
  s.frame = parse_frame(root, s.geometry, p);
  s.transverse = parse_transverse(root, s.geometry, p);
  s.modes = parse_modes(root, s.transverse, p);
  s.solver = parse_solver(root, s.geometry, p);

  if (root.contains("constants")) {
    if (!root.at("constants").is_object()) {
      p.add("constants: expected an object");
    } else {
      const json& c = root.at("constants");
      check_keys(c, "constants", {"hbar"}, p);
      s.hbar = num_or(c, "constants", "hbar", 1.0, p);
      if (s.hbar <= 0) p.add("constants.hbar: must be positive");
    }
  }

  s.output = str_or(root, "scenario", "output", "out", p);
  if (s.output.empty()) p.add("output: must be a nonempty directory name");

  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned())
      p.add("seed: expected a nonnegative integer");
    else
      s.seed = v.get<std::uint64_t>();
  }

  p.finish();
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace tubular::cli
