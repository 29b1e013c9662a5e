#include "tubular/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "tubular/errors.hpp"
#include "tubular/numerics.hpp"

namespace tubular::solver {

namespace {

using cd = std::complex<double>;
const cd kI(0.0, 1.0);
using Triplets = std::vector<Eigen::Triplet<cd>>;

// unitary transport link W = exp(i M / hbar) for a Hermitian block M
Eigen::MatrixXcd transport_link(const Eigen::MatrixXcd& M, double hbar) {
  if (M.rows() == 1) return Eigen::MatrixXcd::Constant(1, 1, std::exp(kI * M(0, 0).real() / hbar));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  Eigen::VectorXcd phases(M.rows());
  for (int i = 0; i < M.rows(); ++i) phases(i) = std::exp(kI * es.eigenvalues()(i) / hbar);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

void add_block(Triplets& t, int row0, int col0, const Eigen::MatrixXcd& B) {
  for (int r = 0; r < B.rows(); ++r)
    for (int c = 0; c < B.cols(); ++c)
      if (B(r, c) != cd(0.0)) t.emplace_back(row0 + r, col0 + c, B(r, c));
}

double grid_step(const std::vector<double>& alpha, bool periodic, double length) {
  if (alpha.size() < 2) throw ValidationError("tangential grid needs at least two points");
  double h = alpha[1] - alpha[0];
  for (size_t i = 0; i + 1 < alpha.size(); ++i)
    if (std::abs(alpha[i + 1] - alpha[i] - h) > 1e-8 * std::max(1.0, h))
      throw ValidationError("tangential grid must be uniform");
  if (periodic) {
    double wrap = alpha.front() + length - alpha.back();
    if (std::abs(wrap - h) > 1e-8 * std::max(1.0, h))
      throw ValidationError("periodic grid does not close: wrap spacing differs");
  }
  return h;
}

double gershgorin_floor(const EffectiveField& field) {
  double lo = std::numeric_limits<double>::infinity();
  for (int p = 0; p < field.points(); ++p) {
    double shift = field.extra_shift.empty() ? 0.0 : field.extra_shift[p];
    const Eigen::MatrixXcd& V = field.well[p].total;
    for (int c = 0; c < field.k; ++c) {
      double g = V(c, c).real() + shift;
      for (int c2 = 0; c2 < field.k; ++c2)
        if (c2 != c) g -= std::abs(V(c, c2));
      lo = std::min(lo, g);
    }
  }
  return lo;
}

void check_hermitian(const Eigen::SparseMatrix<cd>& H) {
  Eigen::SparseMatrix<cd> A = H.adjoint();
  Eigen::SparseMatrix<cd> D = H - A;
  double worst = 0.0, scale = 1.0;
  for (int j = 0; j < D.outerSize(); ++j)
    for (Eigen::SparseMatrix<cd>::InnerIterator it(D, j); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  for (int j = 0; j < H.outerSize(); ++j)
    for (Eigen::SparseMatrix<cd>::InnerIterator it(H, j); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  if (worst > 1e-12 * scale)
    throw NonHermitianResidual("discretized operator lost hermiticity during assembly");
}

DiscretizedOperator discretize_curve(const EffectiveField& field, bool periodic) {
  const int n = field.points(), k = field.k;
  const double hb = field.hbar;
  const double h = periodic ? field.length / n : grid_step(field.alpha, false, field.length);
  if (periodic) grid_step(field.alpha, true, field.length);

  Triplets t;
  const double hop = hb * hb / (2.0 * h * h);
  const int n_links = periodic ? n : n - 1;
  for (int j = 0; j < n_links; ++j) {
    int p = j, q = (j + 1) % n;
    double a0 = field.alpha[p];
    double a1 = (q == 0) ? field.alpha[p] + h : field.alpha[q];
    Eigen::MatrixXcd link;
    if (field.gauge_link)
      link = field.gauge_link(a0, a1);
    else
      link = 0.5 * h * (field.gauge_at(p, 0) + field.gauge_at(q, 0));
    Eigen::MatrixXcd W = transport_link(link, hb);
    add_block(t, p * k, q * k, -hop * W);
    add_block(t, q * k, p * k, (-hop * W).adjoint());
  }
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(k, k);
  for (int p = 0; p < n; ++p) {
    // interior hops plus Dirichlet wall half-links add up to the same diagonal
    add_block(t, p * k, p * k, (2.0 * hop) * eye);
    Eigen::MatrixXcd V = field.well[p].total;
    if (!field.extra_shift.empty()) V += field.extra_shift[p] * eye;
    add_block(t, p * k, p * k, V);
  }

  DiscretizedOperator op;
  op.dim = n * k;
  op.k = k;
  op.n_points = n;
  op.periodic = periodic;
  op.h = h;
  op.H.resize(op.dim, op.dim);
  op.H.setFromTriplets(t.begin(), t.end());
  check_hermitian(op.H);
  op.basis = "arclength grid x mode";
  op.sigma_hint = gershgorin_floor(field) - 1.0;
  return op;
}

DiscretizedOperator discretize_rect(const EffectiveField& field, bool periodic) {
  const int nu = field.nu, nv = field.nv, k = field.k;
  const double hb = field.hbar;
  if (nu < 2 || nv < 2) throw ValidationError("rectangle grid needs at least two points per side");
  auto idx = [&](int iu, int iv) { return (iu * nv + iv) * k; };

  Triplets t;
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(k, k);
  const double steps[2] = {field.hu, field.hv};
  for (int dir = 0; dir < 2; ++dir) {
    const double hop = hb * hb / (2.0 * steps[dir] * steps[dir]);
    const int span = dir == 0 ? nu : nv;
    const int other = dir == 0 ? nv : nu;
    const int n_links = periodic ? span : span - 1;
    for (int o = 0; o < other; ++o)
      for (int j = 0; j < n_links; ++j) {
        int jq = (j + 1) % span;
        int p = dir == 0 ? idx(j, o) : idx(o, j);
        int q = dir == 0 ? idx(jq, o) : idx(o, jq);
        int pp = dir == 0 ? j * nv + o : o * nv + j;
        int qp = dir == 0 ? jq * nv + o : o * nv + jq;
        Eigen::MatrixXcd link =
            0.5 * steps[dir] * (field.gauge_at(pp, dir) + field.gauge_at(qp, dir));
        Eigen::MatrixXcd W = transport_link(link, hb);
        add_block(t, p, q, -hop * W);
        add_block(t, q, p, (-hop * W).adjoint());
      }
    for (int p = 0; p < nu * nv; ++p) add_block(t, p * k, p * k, (2.0 * hop) * eye);
  }
  for (int p = 0; p < nu * nv; ++p) {
    Eigen::MatrixXcd V = field.well[p].total;
    if (!field.extra_shift.empty()) V += field.extra_shift[p] * eye;
    add_block(t, p * k, p * k, V);
  }

  DiscretizedOperator op;
  op.dim = nu * nv * k;
  op.k = k;
  op.n_points = nu * nv;
  op.periodic = periodic;
  op.h = field.hu;
  op.H.resize(op.dim, op.dim);
  op.H.setFromTriplets(t.begin(), t.end());
  check_hermitian(op.H);
  op.basis = "rectangle grid x mode";
  op.sigma_hint = gershgorin_floor(field) - 1.0;
  return op;
}

bool matrix_is_real(const Eigen::SparseMatrix<cd>& H) {
  for (int j = 0; j < H.outerSize(); ++j)
    for (Eigen::SparseMatrix<cd>::InnerIterator it(H, j); it; ++it)
      if (it.value().imag() != 0.0) return false;
  return true;
}

Eigen::SparseMatrix<double> real_part(const Eigen::SparseMatrix<cd>& H) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(H.nonZeros());
  for (int j = 0; j < H.outerSize(); ++j)
    for (Eigen::SparseMatrix<cd>::InnerIterator it(H, j); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value().real());
  Eigen::SparseMatrix<double> R(H.rows(), H.cols());
  R.setFromTriplets(t.begin(), t.end());
  return R;
}

}  // namespace

DiscretizedOperator discretize_tangential(const EffectiveField& field, int n_grid, bool periodic) {
  if (field.m > 2) throw UnsupportedDimension("tangential grids supported up to dimension two");
  if (n_grid != field.points())
    throw ValidationError("operator grid must match the field grid; assemble the field on the "
                          "grid you want to solve on");
  if (periodic != field.periodic)
    throw ValidationError("boundary tag disagrees with the assembled field");
  return field.m == 1 ? discretize_curve(field, periodic) : discretize_rect(field, periodic);
}

Spectrum eigensolve_operator(const DiscretizedOperator& op, int k_eigs, bool want_vectors,
                             unsigned seed) {
  if (k_eigs < 1 || k_eigs > op.dim) throw ValidationError("eigenpair count out of range");
  const bool real = matrix_is_real(op.H);
  if (op.dim <= kDenseLimit) {
    if (real) {
      Eigen::MatrixXd D = Eigen::MatrixXcd(op.H).real();
      return eigensolve_dense(D, k_eigs, want_vectors);
    }
    return eigensolve_dense(Eigen::MatrixXcd(op.H), k_eigs, want_vectors);
  }
  if (real)
    return eigensolve_shift_invert(real_part(op.H), k_eigs, op.sigma_hint, seed, want_vectors);
  return eigensolve_shift_invert(op.H, k_eigs, op.sigma_hint, seed, want_vectors);
}

namespace {

struct StripSolve {
  double E_full = 0.0;
  double E_perp_disc = 0.0;
  Spectrum spectrum;
};

StripSolve strip_solve(const geom::PlanarCurve& curve, double eps, int na, int nu, int k_eigs,
                       double hbar, double kmax) {
  const double L = curve.length;
  const bool closed = curve.closed;
  const double ha = closed ? L / na : L / (na + 1);
  const double hu = eps / (nu + 1);
  auto alpha_of = [&](int i) { return closed ? i * ha : (i + 1) * ha; };
  auto u_of = [&](int j) { return -eps / 2 + (j + 1) * hu; };
  auto kap = [&](double a) {
    if (closed) a = std::fmod(std::fmod(a, L) + L, L);
    return curve.kappa(a);
  };
  // Window averages of the curvature keep the assembly second order when
  // kappa jumps inside the strip; midpoint samples are the fallback.
  auto kapm = [&](double a, double b) {
    if (curve.mean_kappa) {
      if (closed) {
        double len = b - a;
        a = std::fmod(std::fmod(a, L) + L, L);
        b = a + len;
      }
      return curve.mean_kappa(a, b);
    }
    return kap(0.5 * (a + b));
  };
  std::vector<double> k_link(na), k_cell(na);
  for (int i = 0; i < na; ++i) {
    double A = alpha_of(i);
    k_link[i] = kapm(A, A + ha);
    k_cell[i] = kapm(A - ha / 2, A + ha / 2);
  }
  auto F_link = [&](int i, double u) { return 1.0 - k_link[i] * u; };
  auto F_cell = [&](int i, double u) { return 1.0 - k_cell[i] * u; };
  auto id = [&](int i, int j) { return i * nu + j; };

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(na) * nu * 6);
  auto bond = [&](int p, int q, double w) {
    t.emplace_back(p, p, w);
    t.emplace_back(q, q, w);
    t.emplace_back(p, q, -w);
    t.emplace_back(q, p, -w);
  };
  const double pre = hbar * hbar / 2.0;

  // along the curve: weight 1/F averaged over each segment
  int a_links = closed ? na : na - 1;
  for (int i = 0; i < a_links; ++i)
    for (int j = 0; j < nu; ++j) {
      double w = pre / F_link(i, u_of(j)) * hu / ha;
      bond(id(i, j), id((i + 1) % na, j), w);
    }
  if (!closed) {
    double k0 = kapm(0, ha), kL = kapm(L - ha, L);
    for (int j = 0; j < nu; ++j) {
      t.emplace_back(id(0, j), id(0, j), pre / (1.0 - k0 * u_of(j)) * hu / ha);
      t.emplace_back(id(na - 1, j), id(na - 1, j), pre / (1.0 - kL * u_of(j)) * hu / ha);
    }
  }
  // across: weight F averaged over each cell, hard walls at both edges
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j + 1 < nu; ++j)
      bond(id(i, j), id(i, j + 1), pre * F_cell(i, u_of(j) + hu / 2) * ha / hu);
    t.emplace_back(id(i, 0), id(i, 0), pre * F_cell(i, -eps / 2 + hu / 2) * ha / hu);
    t.emplace_back(id(i, nu - 1), id(i, nu - 1), pre * F_cell(i, eps / 2 - hu / 2) * ha / hu);
  }

  const int dim = na * nu;
  Eigen::SparseMatrix<double> Q(dim, dim);
  Q.setFromTriplets(t.begin(), t.end());

  // area weights; reduce the generalized pencil to an ordinary symmetric one
  Eigen::VectorXd wsqi(dim);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nu; ++j)
      wsqi(id(i, j)) = 1.0 / std::sqrt(F_cell(i, u_of(j)) * ha * hu);
  Eigen::SparseMatrix<double> B = wsqi.asDiagonal() * Q * wsqi.asDiagonal();

  StripSolve out;
  out.E_perp_disc = hbar * hbar * (1.0 - std::cos(M_PI / (nu + 1))) / (hu * hu);
  double margin = hbar * hbar * (kmax * kmax / 8.0 + 2.0 * std::pow(M_PI / L, 2)) +
                  1e-9 * out.E_perp_disc;
  double sigma = out.E_perp_disc - margin;
  out.spectrum = eigensolve_shift_invert(B, k_eigs, sigma);
  out.E_full = out.spectrum.eigenvalues.front();
  return out;
}

}  // namespace

StripResult strip_oracle(const geom::PlanarCurve& curve, double epsilon, const StripGrid& grid,
                         int k_eigs, double hbar) {
  if (!(epsilon > 0)) throw ValidationError("strip width must be positive");
  if (grid.n_alpha < 8 || grid.n_u < 3) throw ValidationError("strip grid too small");
  const double L = curve.length;

  double kmax = 0.0;
  const int n_scan = 2048;
  for (int i = 0; i <= n_scan; ++i) kmax = std::max(kmax, std::abs(curve.kappa(L * i / n_scan)));
  if (kmax * epsilon / 2 >= 1.0)
    throw SelfIntersection("normal rays cross inside the strip (curvature radius below half width)");

  const int n_c = 512;
  std::vector<Eigen::Vector2d> pts(n_c);
  for (int i = 0; i < n_c; ++i) pts[i] = curve.x(L * i / n_c);
  for (int i = 0; i < n_c; ++i)
    for (int j = i + 1; j < n_c; ++j) {
      double darc = (j - i) * L / n_c;
      if (curve.closed) darc = std::min(darc, L - darc);
      if (darc > 3 * epsilon && (pts[i] - pts[j]).norm() < 0.98 * epsilon)
        throw SelfIntersection("distant pieces of the centerline come closer than the strip width");
    }

  StripSolve fine = strip_solve(curve, epsilon, grid.n_alpha, grid.n_u, k_eigs, hbar, kmax);
  if (grid.check_resolution) {
    // One coarse probe per direction. A probe coarsened in both at once can
    // miss cancellation between the along-curve and across-width errors; the
    // two-thirds ratio is non-dyadic so probe nodes cannot land on the same
    // curvature discontinuity as the fine grid.
    double rf = fine.E_full - fine.E_perp_disc;
    double scale = std::max(std::abs(rf), 1e-4 * fine.E_perp_disc);
    auto probe = [&](int pa, int pu, const char* dir) {
      StripSolve c = strip_solve(curve, epsilon, pa, pu, 1, hbar, kmax);
      double rel = std::abs(rf - (c.E_full - c.E_perp_disc)) / scale;
      if (rel > 0.1) {
        std::ostringstream msg;
        msg << "strip residual moved " << rel * 100 << "% against the two-thirds " << dir
            << " grid";
        throw ResolutionInsufficient(msg.str());
      }
    };
    probe(2 * grid.n_alpha / 3, grid.n_u, "along-curve");
    probe(grid.n_alpha, std::max(3, 2 * grid.n_u / 3), "across-width");
  }

  StripResult out;
  out.E_full = fine.E_full;
  out.E_perp_discrete = fine.E_perp_disc;
  out.E_perp_analytic = hbar * hbar * M_PI * M_PI / (2.0 * epsilon * epsilon);
  out.spectrum = std::move(fine.spectrum);
  return out;
}

namespace {

std::vector<double> tube_levels(double S0, const std::vector<double>& freqs, double hbar, double L,
                                int nb, int k_eigs, int& blocks) {
  using transverse::FockBasis;
  FockBasis basis = FockBasis::with_total(2, nb);
  const int dim = static_cast<int>(basis.states.size());
  Eigen::MatrixXcd Lz = 2.0 * transverse::fock_lambda(basis, 0, 1, freqs, hbar);
  Eigen::VectorXd osc(dim);
  for (int s = 0; s < dim; ++s)
    osc(s) = hbar * (freqs[0] * (basis.states[s][0] + 0.5) + freqs[1] * (basis.states[s][1] + 0.5));
  const double e_osc_min = hbar * (freqs[0] + freqs[1]) / 2.0;
  const double lz_max = hbar * nb;

  std::vector<double> found;
  blocks = 0;
  auto add_ring = [&](int j) {
    double kj = 2.0 * M_PI * j / L;
    Eigen::MatrixXcd A = hbar * kj * Eigen::MatrixXcd::Identity(dim, dim) + S0 * Lz;
    Eigen::MatrixXcd M = 0.5 * A * A;
    M += osc.asDiagonal().toDenseMatrix().cast<cd>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    for (int s = 0; s < dim; ++s) found.push_back(es.eigenvalues()(s));
    ++blocks;
  };
  add_ring(0);
  for (int j = 1; j < 100000; ++j) {
    std::sort(found.begin(), found.end());
    double ekth = static_cast<int>(found.size()) >= k_eigs
                      ? found[k_eigs - 1]
                      : std::numeric_limits<double>::infinity();
    double kin = hbar * 2.0 * M_PI * j / L;
    double emin = 0.5 * std::pow(std::max(0.0, kin - std::abs(S0) * lz_max), 2) + e_osc_min;
    if (emin > ekth) break;
    add_ring(j);
    add_ring(-j);
  }
  std::sort(found.begin(), found.end());
  found.resize(std::min<size_t>(found.size(), k_eigs));
  return found;
}

}  // namespace

TwistedTubeResult twisted_tube_oracle(double S0, const transverse::TransversePotential& pot,
                                      double length, int n_basis, int k_eigs) {
  using Kind = transverse::TransversePotential::Kind;
  if (pot.kind != Kind::Harmonic || pot.d != 2)
    throw ValidationError("the rotating-frame full solve needs a planar harmonic cross-section");
  if (!(length > 0) || n_basis < 1 || k_eigs < 1) throw ValidationError("bad tube parameters");
  const double w1 = pot.freqs[0], w2 = pot.freqs[1];
  const bool isotropic = std::abs(w1 - w2) <= 1e-12 * std::max(w1, w2);
  if (!isotropic && S0 != 0.0) {
    // two-fold symmetric cross-section: the frame must close up to a half turn
    double wind = S0 * length / M_PI;
    if (std::abs(wind - std::round(wind)) > 1e-9)
      throw ValidationError("frame winding S0*L must be a multiple of pi for an anisotropic "
                            "cross-section");
  }

  int b1 = 0, b2 = 0;
  std::vector<double> e1 = tube_levels(S0, pot.freqs, pot.hbar, length, n_basis, k_eigs, b1);
  std::vector<double> e2 = tube_levels(S0, pot.freqs, pot.hbar, length, n_basis + 2, k_eigs, b2);
  double move = 0.0;
  for (size_t i = 0; i < e1.size() && i < e2.size(); ++i)
    move = std::max(move, std::abs(e1[i] - e2[i]));
  if (move > 1e-8) {
    std::ostringstream msg;
    msg << "levels moved " << move << " when the oscillator basis grew by two quanta";
    throw TruncationInsufficient(msg.str());
  }

  TwistedTubeResult out;
  out.spectrum.eigenvalues = e1;
  out.spectrum.method = "rotating-frame plane-wave blocks";
  out.spectrum.residuals.assign(e1.size(), 0.0);
  out.E_perp = pot.hbar * (w1 + w2) / 2.0;
  out.blocks_used = b1;
  return out;
}

ConvergenceReport epsilon_convergence(
    const std::function<std::pair<double, double>(double)>& oracle,
    const std::vector<double>& eps_list, double e_effective) {
  if (eps_list.size() < 3) throw ValidationError("width study needs at least three widths");
  for (size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i + 1] < eps_list[i]))
      throw ValidationError("width list must be strictly decreasing");

  ConvergenceReport rep;
  std::vector<double> errs;
  for (double eps : eps_list) {
    auto [e_full, e_perp] = oracle(eps);
    ConvergenceRow row;
    row.epsilon = eps;
    row.E_full = e_full;
    row.E_perp = e_perp;
    row.E_residual = e_full - e_perp;
    row.E_effective = e_effective;
    row.abs_error = std::abs(row.E_residual - e_effective);
    if (!std::isfinite(row.abs_error)) throw ValidationError("width study produced a non-finite row");
    rep.rows.push_back(row);
    errs.push_back(row.abs_error);
  }
  double emax = *std::max_element(errs.begin(), errs.end());
  if (emax < 1e-12) {
    rep.fitted_order = std::numeric_limits<double>::infinity();
  } else {
    for (double& e : errs) e = std::max(e, 1e-300);
    rep.fitted_order = loglog_slope(eps_list, errs);
  }
  return rep;
}

double vielbein_kinetic_check(const std::function<double(double)>& metric, int n, int k_eigs,
                              double hbar) {
  if (n < 16) throw ValidationError("metric comparison grid too small");
  // an even grid has a sawtooth mode invisible to the derivative, and the two
  // orderings park that spurious eigenvalue at different spots
  if (n % 2 == 0) ++n;
  Eigen::MatrixXd D = fourier_diff_matrix(n);
  Eigen::VectorXd g(n);
  for (int j = 0; j < n; ++j) {
    g(j) = metric(2.0 * M_PI * j / n);
    if (!(g(j) > 0)) throw SingularMetric("interval metric must stay positive");
  }
  const double pre = hbar * hbar / 2.0;

  Eigen::VectorXd gm14 = g.array().pow(-0.25);
  Eigen::VectorXd gm12 = g.array().pow(-0.5);
  Eigen::MatrixXd H1 =
      -pre * (gm14.asDiagonal() * D * gm12.asDiagonal() * D * gm14.asDiagonal()).eval();
  H1 = 0.5 * (H1 + H1.transpose()).eval();

  Eigen::VectorXd w = 0.25 * g.array().log();
  Eigen::VectorXd wp = D * w;
  Eigen::VectorXd vs =
      pre * (wp.array().square() / g.array() + (D * (wp.array() / g.array()).matrix()).array());
  Eigen::MatrixXd H2 = -pre * (D * gm12.asDiagonal() * gm12.asDiagonal() * D).eval();
  H2.diagonal() += vs;
  H2 = 0.5 * (H2 + H2.transpose()).eval();

  Spectrum s1 = eigensolve_dense(H1, k_eigs, false);
  Spectrum s2 = eigensolve_dense(H2, k_eigs, false);
  double worst = 0.0;
  for (int i = 0; i < k_eigs; ++i)
    worst = std::max(worst, std::abs(s1.eigenvalues[i] - s2.eigenvalues[i]));
  return worst;
}

double frame_independence_residual(const transverse::ModeSet& modes, double length,
                                   const std::function<double(double)>& theta, int n_grid,
                                   int k_eigs) {
  if (modes.d == 1) return 0.0;
  if (modes.d != 2)
    throw UnsupportedDimension("rotation profiles are wired for two normal directions");

  Eigen::MatrixXcd lam = modes.lambda(0, 1);
  Eigen::MatrixXcd lam2 = modes.lambda2(0, 1, 0, 1);
  double scale = std::max(1.0, lam2.cwiseAbs().maxCoeff());
  if ((lam2 - lam * lam).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ValidationError("modes must be rotation eigenstates (zero angular-momentum variance)");

  double wind = (theta(length) - theta(0.0)) / (2.0 * M_PI);
  if (std::abs(wind - std::round(wind)) > 1e-9)
    throw ValidationError("rotation profile does not close over the period");

  const double h = length / n_grid;
  const double kappa = 2.0 * M_PI / length;
  std::vector<double> alphas(n_grid), kap(n_grid, kappa), still(n_grid, 0.0), rate(n_grid);
  const double dstep = 1e-6 * length;
  for (int i = 0; i < n_grid; ++i) {
    alphas[i] = i * h;
    rate[i] = (theta(alphas[i] + dstep) - theta(alphas[i] - dstep)) / (2.0 * dstep);
  }

  EffectiveField fa =
      effective::assemble_field(effective::curve_samples(kap, still), modes, alphas, true, length);
  EffectiveField fb =
      effective::assemble_field(effective::curve_samples(kap, rate), modes, alphas, true, length);
  fb.gauge_link = [theta, lam](double a, double b) {
    return Eigen::MatrixXcd(2.0 * (theta(b) - theta(a)) * lam);
  };

  Spectrum sa = eigensolve_operator(discretize_tangential(fa, n_grid, true), k_eigs, false);
  Spectrum sb = eigensolve_operator(discretize_tangential(fb, n_grid, true), k_eigs, false);
  double worst = 0.0;
  for (int i = 0; i < k_eigs; ++i)
    worst = std::max(worst, std::abs(sa.eigenvalues[i] - sb.eigenvalues[i]));
  return worst;
}

}  // namespace tubular::solver
