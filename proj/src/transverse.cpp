#include "tubular/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tubular/eigensolve.hpp"
#include "tubular/errors.hpp"
#include "tubular/numerics.hpp"

namespace tubular::transverse {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

bool segments_properly_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  double d1 = cross2(b - a, c - a);
  double d2 = cross2(b - a, d - a);
  double d3 = cross2(d - c, a - c);
  double d4 = cross2(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

bool point_in_polygon(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p) {
  bool inside = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

TransversePotential harmonic_potential(std::vector<double> freqs, double hbar) {
  if (freqs.empty()) throw ValidationError("harmonic potential needs at least one frequency");
  for (double w : freqs)
    if (!(w > 0)) throw ValidationError("harmonic frequencies must be strictly positive");
  if (!(hbar > 0)) throw ValidationError("hbar must be positive");
  TransversePotential pot;
  pot.kind = TransversePotential::Kind::Harmonic;
  pot.d = static_cast<int>(freqs.size());
  pot.freqs = std::move(freqs);
  pot.hbar = hbar;
  return pot;
}

TransversePotential polygon_potential(std::vector<Eigen::Vector2d> vertices, double hbar) {
  size_t n = vertices.size();
  if (n < 3) throw ValidationError("polygon needs at least three vertices");
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_properly_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                      vertices[(j + 1) % n]))
        throw ValidationError("polygon is self-intersecting");
    }
  }
  if (!point_in_polygon(vertices, Eigen::Vector2d::Zero()))
    throw ValidationError("polygon must contain the origin");
  TransversePotential pot;
  pot.kind = TransversePotential::Kind::Polygon;
  pot.d = 2;
  pot.vertices = std::move(vertices);
  pot.hbar = hbar;
  return pot;
}

TransversePotential sampled_potential(std::function<double(const Eigen::VectorXd&)> V,
                                      double half_width, double hbar) {
  if (!(half_width > 0)) throw ValidationError("sampled potential needs a positive box size");
  TransversePotential pot;
  pot.kind = TransversePotential::Kind::Sampled;
  pot.d = 2;
  pot.V = std::move(V);
  pot.sample_half_width = half_width;
  pot.hbar = hbar;
  return pot;
}

int ModeSet::pair_index(int mu, int nu) const {
  // lexicographic over mu < nu
  int p = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      if (a == mu && b == nu) return p;
      ++p;
    }
  throw ValidationError("pair_index: bad index pair");
}

Eigen::MatrixXcd ModeSet::lambda(int mu, int nu) const {
  if (mu == nu) return Eigen::MatrixXcd::Zero(k, k);
  if (mu < nu) return Lambda[pair_index(mu, nu)];
  return -Lambda[pair_index(nu, mu)];
}

Eigen::MatrixXcd ModeSet::lambda2(int mu, int nu, int si, int ta) const {
  if (mu == nu || si == ta) return Eigen::MatrixXcd::Zero(k, k);
  double sign = 1.0;
  if (mu > nu) {
    std::swap(mu, nu);
    sign = -sign;
  }
  if (si > ta) {
    std::swap(si, ta);
    sign = -sign;
  }
  return sign * Lambda2[pair_index(mu, nu) * pairs() + pair_index(si, ta)];
}

FockBasis FockBasis::with_total(int d, int total_max) {
  FockBasis b;
  b.d = d;
  b.total_max = total_max;
  std::vector<int> n(d, 0);
  std::function<void(int, int)> rec = [&](int mode, int used) {
    if (mode == d) {
      b.states.push_back(n);
      return;
    }
    for (int q = 0; q + used <= total_max; ++q) {
      n[mode] = q;
      rec(mode + 1, used + q);
    }
    n[mode] = 0;
  };
  rec(0, 0);
  std::sort(b.states.begin(), b.states.end(), [](const auto& a, const auto& c) {
    int sa = 0, sc = 0;
    for (int v : a) sa += v;
    for (int v : c) sc += v;
    if (sa != sc) return sa < sc;
    return a < c;
  });
  for (size_t i = 0; i < b.states.size(); ++i) b.index_of[b.states[i]] = static_cast<int>(i);
  return b;
}

int FockBasis::index(const std::vector<int>& n) const {
  auto it = index_of.find(n);
  return it == index_of.end() ? -1 : it->second;
}

int FockBasis::total(int i) const {
  int s = 0;
  for (int v : states[i]) s += v;
  return s;
}

Eigen::MatrixXcd fock_position(const FockBasis& basis, int mu, const std::vector<double>& freqs,
                               double hbar) {
  int n = static_cast<int>(basis.states.size());
  double c = std::sqrt(hbar / (2.0 * freqs[mu]));
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    std::vector<int> s = basis.states[col];
    s[mu] += 1;
    int up = basis.index(s);
    if (up >= 0) U(up, col) = c * std::sqrt(double(s[mu]));
    s[mu] -= 2;
    if (s[mu] >= 0) {
      int dn = basis.index(s);
      if (dn >= 0) U(dn, col) = c * std::sqrt(double(s[mu] + 1));
    }
  }
  return U;
}

Eigen::MatrixXcd fock_momentum(const FockBasis& basis, int mu, const std::vector<double>& freqs,
                               double hbar) {
  int n = static_cast<int>(basis.states.size());
  double c = std::sqrt(hbar * freqs[mu] / 2.0);
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    std::vector<int> s = basis.states[col];
    s[mu] += 1;
    int up = basis.index(s);
    if (up >= 0) P(up, col) = kI * c * std::sqrt(double(s[mu]));
    s[mu] -= 2;
    if (s[mu] >= 0) {
      int dn = basis.index(s);
      if (dn >= 0) P(dn, col) = -kI * c * std::sqrt(double(s[mu] + 1));
    }
  }
  return P;
}

Eigen::MatrixXcd fock_lambda(const FockBasis& basis, int mu, int nu,
                             const std::vector<double>& freqs, double hbar) {
  Eigen::MatrixXcd U1 = fock_position(basis, mu, freqs, hbar);
  Eigen::MatrixXcd P2 = fock_momentum(basis, nu, freqs, hbar);
  Eigen::MatrixXcd U2 = fock_position(basis, nu, freqs, hbar);
  Eigen::MatrixXcd P1 = fock_momentum(basis, mu, freqs, hbar);
  return 0.5 * (U1 * P2 - U2 * P1);
}

ModeSet harmonic_modes(const std::vector<double>& freqs,
                       const std::vector<std::vector<int>>& occupations, double hbar) {
  TransversePotential pot = harmonic_potential(freqs, hbar);  // validates
  if (occupations.empty()) throw ValidationError("harmonic_modes needs at least one occupation");
  int d = pot.d;
  std::vector<double> energies;
  for (const auto& occ : occupations) {
    if (static_cast<int>(occ.size()) != d)
      throw ValidationError("occupation tuple length must equal the codimension");
    double e = 0;
    for (int mu = 0; mu < d; ++mu) {
      if (occ[mu] < 0) throw ValidationError("occupations must be non-negative");
      e += hbar * freqs[mu] * (occ[mu] + 0.5);
    }
    energies.push_back(e);
  }
  double e0 = energies[0];
  double deg_tol = 1e-6 * std::abs(e0);
  for (double e : energies)
    if (std::abs(e - e0) > deg_tol) {
      std::ostringstream msg;
      msg << "occupations are not degenerate: " << e << " vs " << e0;
      throw NotDegenerate(msg.str());
    }

  ModeSet m;
  m.kind = ModeKind::Harmonic;
  m.d = d;
  m.k = static_cast<int>(occupations.size());
  m.hbar = hbar;
  m.freqs = freqs;
  m.occupations = occupations;
  m.energies = energies;
  m.E_perp = e0;
  for (const auto& occ : occupations) {
    std::ostringstream lbl;
    lbl << "n=(";
    for (int mu = 0; mu < d; ++mu) lbl << occ[mu] << (mu + 1 < d ? "," : ")");
    m.labels.push_back(lbl.str());
  }
  harmonic_lambda_matrices(m);
  return m;
}

void harmonic_lambda_matrices(ModeSet& m) {
  if (m.kind != ModeKind::Harmonic)
    throw ValidationError("harmonic_lambda_matrices needs a harmonic mode set");
  int max_total = 0;
  for (const auto& occ : m.occupations) {
    int s = 0;
    for (int v : occ) s += v;
    max_total = std::max(max_total, s);
  }
  FockBasis basis = FockBasis::with_total(m.d, max_total + 3);
  std::vector<int> cluster;
  for (const auto& occ : m.occupations) cluster.push_back(basis.index(occ));

  int P = m.pairs();
  std::vector<Eigen::MatrixXcd> ops;
  for (int mu = 0; mu < m.d; ++mu)
    for (int nu = mu + 1; nu < m.d; ++nu) ops.push_back(fock_lambda(basis, mu, nu, m.freqs, m.hbar));

  m.Lambda.assign(P, Eigen::MatrixXcd::Zero(m.k, m.k));
  m.Lambda2.assign(P * P, Eigen::MatrixXcd::Zero(m.k, m.k));
  for (int p = 0; p < P; ++p) {
    for (int r = 0; r < m.k; ++r)
      for (int c = 0; c < m.k; ++c) m.Lambda[p](r, c) = ops[p](cluster[r], cluster[c]);
    for (int q = 0; q < P; ++q) {
      Eigen::MatrixXcd prod = ops[p] * ops[q];
      for (int r = 0; r < m.k; ++r)
        for (int c = 0; c < m.k; ++c) m.Lambda2[p * P + q](r, c) = prod(cluster[r], cluster[c]);
    }
  }
}

namespace {

struct GridDomain {
  int nx, ny;
  double h, x0, y0;
  std::vector<std::uint8_t> mask;
  std::vector<int> idx;  // interior index or -1
  int interior = 0;
};

GridDomain build_domain(const TransversePotential& pot, const GridSpec& spec) {
  GridDomain g;
  if (pot.kind == TransversePotential::Kind::Polygon) {
    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
    for (const auto& v : pot.vertices) {
      minx = std::min(minx, v.x());
      maxx = std::max(maxx, v.x());
      miny = std::min(miny, v.y());
      maxy = std::max(maxy, v.y());
    }
    double span = std::max(maxx - minx, maxy - miny);
    // lattice aligned with the bounding box, one exterior layer each side
    g.h = span / (spec.n - 1);
    g.nx = static_cast<int>(std::round((maxx - minx) / g.h)) + 3;
    g.ny = static_cast<int>(std::round((maxy - miny) / g.h)) + 3;
    g.x0 = minx - g.h;
    g.y0 = miny - g.h;
    double edge_eps = 1e-9 * span;
    auto on_boundary = [&](const Eigen::Vector2d& p) {
      size_t nv = pot.vertices.size();
      for (size_t a = 0, b = nv - 1; a < nv; b = a++) {
        Eigen::Vector2d e = pot.vertices[a] - pot.vertices[b];
        Eigen::Vector2d r = p - pot.vertices[b];
        double t = e.squaredNorm() > 0 ? std::clamp(r.dot(e) / e.squaredNorm(), 0.0, 1.0) : 0.0;
        if ((r - t * e).norm() < edge_eps) return true;
      }
      return false;
    };
    g.mask.assign(size_t(g.nx) * g.ny, 0);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        Eigen::Vector2d p(g.x0 + i * g.h, g.y0 + j * g.h);
        if (point_in_polygon(pot.vertices, p) && !on_boundary(p)) g.mask[size_t(i) * g.ny + j] = 1;
      }
  } else {
    double X = spec.half_width;
    if (X <= 0) {
      if (pot.kind == TransversePotential::Kind::Harmonic) {
        double sigma = 0;
        for (double w : pot.freqs) sigma = std::max(sigma, std::sqrt(pot.hbar / w));
        X = 7.0 * sigma;
      } else {
        X = pot.sample_half_width;
      }
    }
    g.nx = g.ny = spec.n;
    g.h = 2.0 * X / (spec.n - 1);
    g.x0 = g.y0 = -X;
    g.mask.assign(size_t(g.nx) * g.ny, 1);
  }
  g.idx.assign(g.mask.size(), -1);
  for (size_t i = 0; i < g.mask.size(); ++i)
    if (g.mask[i]) g.idx[i] = g.interior++;
  return g;
}

double potential_value(const TransversePotential& pot, double x, double y) {
  switch (pot.kind) {
    case TransversePotential::Kind::Harmonic:
      return 0.5 * (pot.freqs[0] * pot.freqs[0] * x * x + pot.freqs[1] * pot.freqs[1] * y * y);
    case TransversePotential::Kind::Polygon:
      return 0.0;
    case TransversePotential::Kind::Sampled: {
      Eigen::VectorXd u(2);
      u << x, y;
      return pot.V(u);
    }
  }
  return 0.0;
}

Eigen::SparseMatrix<double> assemble_grid_hamiltonian(const TransversePotential& pot,
                                                      const GridDomain& g, bool nine_point,
                                                      double hbar) {
  std::vector<Eigen::Triplet<double>> trip;
  const double ke = hbar * hbar / 2.0;
  std::vector<std::pair<int, double>> st;
  if (nine_point)
    st = {{-2, 1.0 / 12}, {-1, -16.0 / 12}, {0, 30.0 / 12}, {1, -16.0 / 12}, {2, 1.0 / 12}};
  else
    st = {{-1, -1.0}, {0, 2.0}, {1, -1.0}};
  const double inv_h2 = 1.0 / (g.h * g.h);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      int row = g.idx[size_t(i) * g.ny + j];
      if (row < 0) continue;
      for (const auto& [o, w] : st) {
        int ii = i + o;
        if (ii >= 0 && ii < g.nx) {
          int col = g.idx[size_t(ii) * g.ny + j];
          if (col >= 0) trip.emplace_back(row, col, ke * w * inv_h2);
        }
        int jj = j + o;
        if (jj >= 0 && jj < g.ny) {
          int col = g.idx[size_t(i) * g.ny + jj];
          if (col >= 0) trip.emplace_back(row, col, ke * w * inv_h2);
        }
      }
      trip.emplace_back(row, row, potential_value(pot, g.x0 + i * g.h, g.y0 + j * g.h));
    }
  Eigen::SparseMatrix<double> H(g.interior, g.interior);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

ModeSet grid_modes_impl(const TransversePotential& pot, const GridSpec& spec, int k_request,
                        bool allow_resolution_check) {
  if (pot.d != 2) throw UnsupportedDimension("grid transverse solver supports d = 2 only");
  if (k_request < 1) throw ValidationError("k_request must be positive");
  if (spec.n < 8) throw ValidationError("grid resolution too small");

  GridDomain g = build_domain(pot, spec);
  Eigen::SparseMatrix<double> H = assemble_grid_hamiltonian(pot, g, spec.nine_point, pot.hbar);

  int n_eigs = std::min(g.interior, spec.index0 + k_request + 3);
  Spectrum sp = eigensolve_shift_invert(H, n_eigs, 0.0);

  const auto& ev = sp.eigenvalues;
  int i0 = spec.index0;
  if (i0 + k_request > static_cast<int>(ev.size()))
    throw ValidationError("requested eigenindex range exceeds computed spectrum");
  double e_ref = ev[i0];
  double deg_tol = 1e-6 * std::abs(e_ref);
  for (int i = i0; i < i0 + k_request; ++i)
    if (std::abs(ev[i] - e_ref) > deg_tol) {
      std::ostringstream msg;
      msg << "requested modes are not degenerate: E[" << i << "]=" << ev[i] << " vs E[" << i0
          << "]=" << e_ref;
      throw DegeneracySplit(msg.str());
    }
  if (i0 > 0 && std::abs(ev[i0 - 1] - e_ref) <= deg_tol)
    throw DegeneracySplit("requested cluster is cut below: preceding eigenvalue is degenerate");
  if (i0 + k_request < static_cast<int>(ev.size()) &&
      std::abs(ev[i0 + k_request] - e_ref) <= deg_tol)
    throw DegeneracySplit("requested cluster is cut above: following eigenvalue is degenerate");

  ModeSet m;
  m.kind = ModeKind::Grid;
  m.d = 2;
  m.k = k_request;
  m.hbar = pot.hbar;
  m.E_perp = e_ref;
  m.grid.nx = g.nx;
  m.grid.ny = g.ny;
  m.grid.h = g.h;
  m.grid.x0 = g.x0;
  m.grid.y0 = g.y0;
  m.grid.mask = g.mask;
  m.grid.modes = Eigen::MatrixXd::Zero(g.nx * g.ny, k_request);
  for (int c = 0; c < k_request; ++c) {
    m.energies.push_back(ev[i0 + c]);
    std::ostringstream lbl;
    lbl << "grid eigenindex " << i0 + c;
    m.labels.push_back(lbl.str());
    Eigen::VectorXd full = Eigen::VectorXd::Zero(g.nx * g.ny);
    for (size_t cell = 0; cell < g.mask.size(); ++cell)
      if (g.idx[cell] >= 0) full(cell) = sp.vectors(g.idx[cell], i0 + c).real();
    full /= full.norm() * g.h;  // L2 normalization on the grid measure
    int arg = 0;
    full.cwiseAbs().maxCoeff(&arg);
    if (full(arg) < 0) full = -full;
    m.grid.modes.col(c) = full;
  }
  for (int a = 0; a < k_request; ++a)
    for (int b = 0; b < k_request; ++b) {
      double ip = m.grid.modes.col(a).dot(m.grid.modes.col(b)) * g.h * g.h;
      if (std::abs(ip - (a == b ? 1.0 : 0.0)) > 1e-8)
        throw ValidationError("grid modes failed the orthonormality check");
    }

  if (spec.check_resolution && allow_resolution_check) {
    GridSpec coarse = spec;
    coarse.n = spec.n / 2;
    coarse.check_resolution = false;
    ModeSet mc;
    try {
      mc = grid_modes_impl(pot, coarse, k_request, false);
    } catch (const DegeneracySplit& e) {
      throw ResolutionInsufficient(std::string("coarse comparison grid splits the cluster: ") +
                                   e.what());
    }
    // a 4% half-resolution shift corresponds to roughly 1% under one refinement
    for (int c = 0; c < k_request; ++c) {
      double rel = std::abs(mc.energies[c] - m.energies[c]) / std::max(std::abs(m.energies[c]), 1e-30);
      if (rel > 0.04) {
        std::ostringstream msg;
        msg << "eigenvalue " << c << " shifts by " << rel * 100 << "% against the half grid";
        throw ResolutionInsufficient(msg.str());
      }
    }
  }

  lambda_matrices(m);
  return m;
}

// first derivative along one axis: fixed antisymmetric central stencil with
// zero extension outside the mask.  The resulting operator is exactly
// skew-symmetric on any mask shape, so the angular momentum quadrature stays
// Hermitian to roundoff even on stair-stepped boundaries.
void axis_derivative(const GridData& g, const Eigen::VectorXcd& phi, int axis,
                     Eigen::VectorXcd& out) {
  out.setZero(phi.size());
  auto value = [&](int i, int j) -> std::complex<double> {
    if (i < 0 || i >= g.nx || j < 0 || j >= g.ny) return 0.0;
    size_t cell = size_t(i) * g.ny + j;
    return g.mask[cell] ? phi(cell) : 0.0;
  };
  const double c1 = 8.0 / (12.0 * g.h), c2 = 1.0 / (12.0 * g.h);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      size_t cell = size_t(i) * g.ny + j;
      if (!g.mask[cell]) continue;
      std::complex<double> acc;
      if (axis == 0)
        acc = c1 * (value(i + 1, j) - value(i - 1, j)) - c2 * (value(i + 2, j) - value(i - 2, j));
      else
        acc = c1 * (value(i, j + 1) - value(i, j - 1)) - c2 * (value(i, j + 2) - value(i, j - 2));
      out(cell) = acc;
    }
}

}  // namespace

ModeSet grid_modes(const TransversePotential& pot, const GridSpec& spec, int k_request) {
  if (spec.n < 64) throw ValidationError("grid must have at least 64 points across the well");
  return grid_modes_impl(pot, spec, k_request, true);
}

Eigen::VectorXcd apply_lambda_grid(const GridData& g, const Eigen::VectorXcd& phi, double hbar) {
  Eigen::VectorXcd dx, dy;
  axis_derivative(g, phi, 0, dx);
  axis_derivative(g, phi, 1, dy);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(phi.size());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      size_t cell = size_t(i) * g.ny + j;
      if (!g.mask[cell]) continue;
      double u1 = g.x0 + i * g.h;
      double u2 = g.y0 + j * g.h;
      out(cell) = -kI * (hbar / 2.0) * (u1 * dy(cell) - u2 * dx(cell));
    }
  return out;
}

void lambda_matrices(ModeSet& m) {
  if (m.kind == ModeKind::Harmonic) {
    harmonic_lambda_matrices(m);
    return;
  }
  if (m.kind != ModeKind::Grid) throw ValidationError("lambda_matrices needs grid or harmonic modes");
  const GridData& g = m.grid;
  double h2 = g.h * g.h;
  std::vector<Eigen::VectorXcd> lphi(m.k), llphi(m.k);
  for (int c = 0; c < m.k; ++c) {
    Eigen::VectorXcd phi = g.modes.col(c).cast<std::complex<double>>();
    lphi[c] = apply_lambda_grid(g, phi, m.hbar);
    llphi[c] = apply_lambda_grid(g, lphi[c], m.hbar);
  }
  Eigen::MatrixXcd L(m.k, m.k), L2(m.k, m.k);
  for (int r = 0; r < m.k; ++r)
    for (int c = 0; c < m.k; ++c) {
      Eigen::VectorXcd bra = g.modes.col(r).cast<std::complex<double>>();
      L(r, c) = bra.dot(lphi[c]) * h2;
      L2(r, c) = bra.dot(llphi[c]) * h2;
    }
  double herm = (L - L.adjoint()).cwiseAbs().maxCoeff() / std::max(m.hbar, L.cwiseAbs().maxCoeff());
  if (herm > 1e-8) {
    std::ostringstream msg;
    msg << "grid angular momentum matrix has hermiticity residual " << herm;
    throw NonHermitianResidual(msg.str());
  }
  m.Lambda.assign(1, 0.5 * (L + L.adjoint().eval()));
  m.Lambda2.assign(1, 0.5 * (L2 + L2.adjoint().eval()));
}

double bessel_zero(int m, int l) {
  int found = 0;
  double x = std::max(1.0, double(m)) * 0.5;
  double prev = std::cyl_bessel_j(m, x);
  for (int step = 0; step < 400000; ++step) {
    double xn = x + 0.01;
    double cur = std::cyl_bessel_j(m, xn);
    if (prev == 0.0) prev = 1e-300;
    if ((prev < 0) != (cur < 0)) {
      ++found;
      if (found == l) {
        double a = x, b = xn;
        for (int it = 0; it < 100; ++it) {
          double mid = 0.5 * (a + b);
          double fm = std::cyl_bessel_j(m, mid);
          if ((fm < 0) == (std::cyl_bessel_j(m, a) < 0))
            a = mid;
          else
            b = mid;
        }
        return 0.5 * (a + b);
      }
    }
    prev = cur;
    x = xn;
  }
  throw NoConvergence("bessel zero search failed");
}

ModeSet disk_modes(double radius, int m_quantum, int radial_index, double hbar) {
  if (!(radius > 0)) throw ValidationError("disk radius must be positive");
  if (m_quantum < 0 || radial_index < 1) throw ValidationError("bad disk mode indices");
  double j = bessel_zero(m_quantum, radial_index);
  ModeSet m;
  m.kind = ModeKind::Analytic;
  m.d = 2;
  m.hbar = hbar;
  m.k = m_quantum == 0 ? 1 : 2;
  m.E_perp = hbar * hbar * j * j / (2.0 * radius * radius);
  m.energies.assign(m.k, m.E_perp);
  Eigen::VectorXd mz(m.k);
  if (m_quantum == 0) {
    m.labels = {"disk m=0 l=" + std::to_string(radial_index)};
    mz << 0;
  } else {
    m.labels = {"disk m=+" + std::to_string(m_quantum) + " l=" + std::to_string(radial_index),
                "disk m=-" + std::to_string(m_quantum) + " l=" + std::to_string(radial_index)};
    mz << m_quantum, -m_quantum;
  }
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(m.k, m.k);
  for (int i = 0; i < m.k; ++i) L(i, i) = 0.5 * hbar * mz(i);  // Lambda = L_z/2
  m.Lambda.assign(1, L);
  m.Lambda2.assign(1, (L * L).eval());
  return m;
}

double omega_commutator_check(int d, int n_max, double hbar) {
  if (d < 2) throw ValidationError("need at least two transverse dimensions");
  FockBasis basis = FockBasis::with_total(d, n_max);
  int n = static_cast<int>(basis.states.size());
  std::vector<Eigen::MatrixXcd> lam;
  std::vector<double> freqs(d, 1.0);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu + 1; nu < d; ++nu) lam.push_back(fock_lambda(basis, mu, nu, freqs, hbar));
  auto omega = [&](int mu, int nu) -> Eigen::MatrixXcd {
    if (mu == nu) return Eigen::MatrixXcd::Zero(n, n);
    double sign = 1.0;
    if (mu > nu) {
      std::swap(mu, nu);
      sign = -1.0;
    }
    int p = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        if (a == mu && b == nu) return (sign / (-kI * hbar)) * lam[p];
        ++p;
      }
    return Eigen::MatrixXcd::Zero(n, n);
  };

  std::vector<int> interior;
  for (int i = 0; i < n; ++i)
    if (basis.total(i) <= n_max - 2) interior.push_back(i);

  double worst = 0;
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu + 1; nu < d; ++nu)
      for (int si = 0; si < d; ++si)
        for (int ta = si + 1; ta < d; ++ta) {
          Eigen::MatrixXcd res = omega(mu, nu) * omega(si, ta) - omega(si, ta) * omega(mu, nu) -
                                 0.5 * (double(mu == si) * omega(ta, nu) +
                                        double(nu == ta) * omega(si, mu) +
                                        double(mu == ta) * omega(nu, si) +
                                        double(nu == si) * omega(mu, ta));
          for (int r : interior)
            for (int c : interior) worst = std::max(worst, std::abs(res(r, c)));
        }
  return worst;
}

std::vector<ReflectionVerdict> reflection_symmetry_report(const TransversePotential& pot,
                                                          const ModeSet& modes) {
  std::vector<ReflectionVerdict> out;
  double diag_tol = 1e-6 * modes.hbar;
  for (int axis = 0; axis < modes.d; ++axis) {
    ReflectionVerdict v;
    v.axis = axis;
    switch (pot.kind) {
      case TransversePotential::Kind::Harmonic:
        v.symmetric = true;
        break;
      case TransversePotential::Kind::Polygon: {
        v.symmetric = true;
        double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
        for (const auto& vx : pot.vertices) {
          minx = std::min(minx, vx.x());
          maxx = std::max(maxx, vx.x());
          miny = std::min(miny, vx.y());
          maxy = std::max(maxy, vx.y());
        }
        for (int i = 0; i < 64 && v.symmetric; ++i)
          for (int j = 0; j < 64 && v.symmetric; ++j) {
            Eigen::Vector2d p(minx + (maxx - minx) * (i + 0.5) / 64,
                              miny + (maxy - miny) * (j + 0.5) / 64);
            Eigen::Vector2d q = p;
            q(axis) = -q(axis);
            if (point_in_polygon(pot.vertices, p) != point_in_polygon(pot.vertices, q))
              v.symmetric = false;
          }
        break;
      }
      case TransversePotential::Kind::Sampled: {
        v.symmetric = true;
        double X = pot.sample_half_width;
        for (int i = 0; i < 32 && v.symmetric; ++i)
          for (int j = 0; j < 32 && v.symmetric; ++j) {
            Eigen::VectorXd p(2);
            p << -X + 2 * X * (i + 0.5) / 32, -X + 2 * X * (j + 0.5) / 32;
            Eigen::VectorXd q = p;
            q(axis) = -q(axis);
            if (std::abs(pot.V(p) - pot.V(q)) > 1e-10 * (1 + std::abs(pot.V(p))))
              v.symmetric = false;
          }
        break;
      }
    }
    if (v.symmetric) {
      for (int other = 0; other < modes.d; ++other) {
        if (other == axis) continue;
        Eigen::MatrixXcd L = modes.lambda(std::min(axis, other), std::max(axis, other));
        for (int r = 0; r < modes.k; ++r)
          v.max_diag_lambda = std::max(v.max_diag_lambda, std::abs(L(r, r)));
      }
      v.lambda_vanishes = v.max_diag_lambda < diag_tol;
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace tubular::transverse
