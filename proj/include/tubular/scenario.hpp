#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace tubular::cli {

// Parsed run description. Parsing fills every field, from the file or from the
// documented default, so downstream code never re-validates.
struct GeometrySpec {
  std::string family;  // circle helix line ellipse arc_line sphere cylinder flat_torus4 samples
  double rho = 1.0;
  double a = 1.0;      // helix radius, ellipse semi-axis
  double b = 1.0;      // helix pitch, ellipse semi-axis
  double angle = 1.5707963267948966;  // arc opening
  double lead = 4.0;                  // straight extensions on both arc ends
  double length = 1.0;
  double R1 = 1.0, R2 = 1.0;  // flat torus radii
  std::string path;           // sample table
  bool closed = false;        // sample table topology
};

struct FrameSpec {
  std::string profile = "frenet";  // frenet constant_rate rotation table
  double twist = 0.0;              // constant rotation rate against the bending frame
  double theta0 = 0.0;
  int winding = 1;      // rotation profile: full turns over the period
  double wobble = 0.0;  // rotation profile: sinusoidal modulation depth
  std::string path;     // frame table
};

struct TransverseSpec {
  std::string kind = "harmonic";  // harmonic disk polygon interval
  std::vector<double> freqs = {1.0, 1.0};
  double radius = 1.0;
  std::vector<std::array<double, 2>> vertices;
  int n_grid = 128;
};

struct ModeSpec {
  std::vector<std::vector<int>> occupations;  // harmonic; defaults to the ground state
  int m_quantum = 1;                          // disk angular number
  int radial_index = 1;
  int index0 = 0;  // grid cluster start
  int k = 1;       // grid cluster size
};

struct SolverSpec {
  int n_grid = 256;
  std::string bc = "auto";  // auto periodic dirichlet
  int k_eigs = 8;
  std::vector<double> eps_list;  // strip widths for the converge command
  int n_alpha = 400;             // strip grid along the curve
  int n_u = 40;                  // strip grid across
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  GeometrySpec geometry;
  FrameSpec frame;
  TransverseSpec transverse;
  ModeSpec modes;
  SolverSpec solver;
  double hbar = 1.0;
  std::string output = "out";
  std::uint64_t seed = 0;
};

// Throws ParseError for unreadable or malformed input, ValidationError listing
// every schema violation at once.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "scenario");

bool curve_family(const std::string& family);
bool planar_family(const std::string& family);
bool surface_family(const std::string& family);

}  // namespace tubular::cli
