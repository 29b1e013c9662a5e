#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace tubular::transverse {

struct TransversePotential {
  enum class Kind { Harmonic, Polygon, Sampled };
  Kind kind = Kind::Harmonic;
  int d = 2;
  double hbar = 1.0;
  std::vector<double> freqs;                          // harmonic
  std::vector<Eigen::Vector2d> vertices;              // polygon, d = 2
  std::function<double(const Eigen::VectorXd&)> V;    // sampled
  double sample_half_width = 0;                       // box for sampled potentials
};

TransversePotential harmonic_potential(std::vector<double> freqs, double hbar = 1.0);
TransversePotential polygon_potential(std::vector<Eigen::Vector2d> vertices, double hbar = 1.0);
TransversePotential sampled_potential(std::function<double(const Eigen::VectorXd&)> V,
                                      double half_width, double hbar = 1.0);

bool point_in_polygon(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p);

struct GridData {
  int nx = 0, ny = 0;
  double h = 0, x0 = 0, y0 = 0;     // u = (x0 + i h, y0 + j h)
  std::vector<std::uint8_t> mask;   // row-major nx*ny, 1 = interior
  Eigen::MatrixXd modes;            // (nx*ny) x k, zero outside the mask
};

enum class ModeKind { Harmonic, Grid, Analytic };

// Degenerate transverse cluster with its angular-momentum data.
struct ModeSet {
  ModeKind kind = ModeKind::Harmonic;
  int d = 2;
  int k = 0;
  double hbar = 1.0;
  double E_perp = 0.0;
  std::vector<double> energies;
  std::vector<double> freqs;
  std::vector<std::vector<int>> occupations;
  std::vector<std::string> labels;
  GridData grid;
  std::vector<Eigen::MatrixXcd> Lambda;   // per index pair mu < nu, lexicographic
  std::vector<Eigen::MatrixXcd> Lambda2;  // per ordered pair of pairs, p * pairs() + q

  int pairs() const { return d * (d - 1) / 2; }
  int pair_index(int mu, int nu) const;  // requires mu < nu
  Eigen::MatrixXcd lambda(int mu, int nu) const;
  Eigen::MatrixXcd lambda2(int mu, int nu, int si, int ta) const;
};

// Occupation-number basis truncated by total quanta.
struct FockBasis {
  int d = 0;
  int total_max = 0;
  std::vector<std::vector<int>> states;
  std::map<std::vector<int>, int> index_of;

  static FockBasis with_total(int d, int total_max);
  int index(const std::vector<int>& n) const;
  int total(int i) const;
};

// Matrix of Lambda_{mu nu} = (u_mu pi_nu - u_nu pi_mu)/2 on the truncated basis.
Eigen::MatrixXcd fock_lambda(const FockBasis& basis, int mu, int nu,
                             const std::vector<double>& freqs, double hbar);
Eigen::MatrixXcd fock_position(const FockBasis& basis, int mu, const std::vector<double>& freqs,
                               double hbar);
Eigen::MatrixXcd fock_momentum(const FockBasis& basis, int mu, const std::vector<double>& freqs,
                               double hbar);

ModeSet harmonic_modes(const std::vector<double>& freqs,
                       const std::vector<std::vector<int>>& occupations, double hbar = 1.0);
void harmonic_lambda_matrices(ModeSet& modes);

struct GridSpec {
  int n = 128;               // points per axis
  double half_width = 0;     // 0 = automatic (harmonic only)
  bool nine_point = false;   // wide-cross fourth-order stencil
  bool check_resolution = true;
  int index0 = 0;            // first eigenindex of the requested cluster
};

ModeSet grid_modes(const TransversePotential& pot, const GridSpec& spec, int k_request);
void lambda_matrices(ModeSet& modes);

// Angular momentum applied to a full-grid array, central stencils with zero
// extension outside the mask (exactly skew for any mask shape).
Eigen::VectorXcd apply_lambda_grid(const GridData& g, const Eigen::VectorXcd& phi, double hbar);

// Analytic hard-wall disk cluster: angular quantum +/- m, radial index l.
ModeSet disk_modes(double radius, int m_quantum, int radial_index = 1, double hbar = 1.0);
double bessel_zero(int m, int l);

double omega_commutator_check(int d, int n_max, double hbar = 1.0);

struct ReflectionVerdict {
  int axis = 0;
  bool symmetric = false;
  double max_diag_lambda = 0.0;
  bool lambda_vanishes = false;
};
std::vector<ReflectionVerdict> reflection_symmetry_report(const TransversePotential& pot,
                                                          const ModeSet& modes);

}  // namespace tubular::transverse
