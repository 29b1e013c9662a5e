#include "tubular/eigensolve.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tubular/errors.hpp"

namespace tubular {

namespace {

template <typename Derived>
Spectrum dense_impl(const Eigen::MatrixBase<Derived>& H, int k, bool want_vectors) {
  using Matrix = typename Derived::PlainObject;
  const int n = static_cast<int>(H.rows());
  if (k <= 0 || k > n) throw ValidationError("eigensolve: requested count out of range");
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      H.derived(), want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NoConvergence("dense symmetric eigensolver failed");
  Spectrum out;
  out.method = "dense";
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  if (want_vectors) {
    out.vectors = es.eigenvectors().leftCols(k).template cast<std::complex<double>>();
    for (int i = 0; i < k; ++i) {
      auto r = H.derived() * es.eigenvectors().col(i) -
               es.eigenvalues()(i) * es.eigenvectors().col(i);
      out.residuals.push_back(r.norm());
    }
  }
  return out;
}

template <typename Scalar>
double sparse_inf_norm(const Eigen::SparseMatrix<Scalar>& H) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(H.rows());
  for (int c = 0; c < H.outerSize(); ++c)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(H, c); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

void fill_random(Eigen::VectorXd& v, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < v.size(); ++i) v(i) = g(rng);
}

void fill_random(Eigen::VectorXcd& v, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < v.size(); ++i) v(i) = std::complex<double>(g(rng), g(rng));
}

template <typename Scalar>
Spectrum shift_invert_impl(const Eigen::SparseMatrix<Scalar>& H, int k, double sigma,
                           std::uint64_t seed, bool want_vectors) {
  using SpMat = Eigen::SparseMatrix<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(H.rows());
  if (k <= 0 || k > n) throw ValidationError("eigensolve: requested count out of range");

  SpMat ident(n, n);
  ident.setIdentity();
  SpMat A = H - Scalar(sigma) * ident;
  A.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "shift-invert factorization failed at sigma=" << sigma;
    throw NoConvergence(msg.str());
  }

  const double hnorm = sparse_inf_norm(H);
  const double tol = kResidualTol * std::max(hnorm, 1.0);

  const int max_basis = std::min(n, std::max(4 * k + 80, 140));
  Matrix V(n, max_basis);
  std::vector<double> alpha, beta;

  std::mt19937_64 rng(seed);
  Vector v(n);
  fill_random(v, rng);
  v.normalize();
  V.col(0) = v;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small_es;
  int used = 0;
  for (int j = 0; j < max_basis; ++j) {
    used = j + 1;
    Vector w = lu.solve(V.col(j));
    Scalar a = V.col(j).dot(w);
    alpha.push_back(std::real(a));
    w -= Scalar(alpha[j]) * V.col(j);
    if (j > 0) w -= Scalar(beta[j - 1]) * V.col(j - 1);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) w -= V.col(i).dot(w) * V.col(i);
    double b = w.norm();

    bool exhausted = b < 1e-13 || j + 1 == max_basis;
    bool ready = false;
    if (used >= k + 2 || exhausted) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
      for (int i = 0; i < used; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < used) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      small_es.compute(T);
      // Ritz pairs of (H - sigma)^{-1}; bound = |beta_j * s_last|
      ready = used >= k;
      for (int i = 0; i < k && ready; ++i) {
        int idx = used - 1 - i;  // largest thetas approximate eigenvalues nearest sigma
        double bound = b * std::abs(small_es.eigenvectors()(used - 1, idx));
        double theta = small_es.eigenvalues()(idx);
        if (std::abs(theta) < 1e-300) ready = false;
        else if (bound > 1e-13 * std::max(std::abs(theta), 1e-10)) ready = false;
      }
      if (ready || exhausted) {
        std::vector<std::pair<double, int>> lam;
        for (int i = 0; i < k && i < used; ++i) {
          int idx = used - 1 - i;
          double theta = small_es.eigenvalues()(idx);
          if (std::abs(theta) < 1e-300) continue;
          lam.emplace_back(sigma + 1.0 / theta, idx);
        }
        std::sort(lam.begin(), lam.end());
        if (static_cast<int>(lam.size()) == k) {
          Spectrum out;
          out.method = "shift-invert-lanczos";
          out.iterations = used;
          Matrix X(n, k);
          bool certified = true;
          for (int i = 0; i < k; ++i) {
            Vector x = V.leftCols(used) * small_es.eigenvectors().col(lam[i].second);
            x.normalize();
            X.col(i) = x;
            double res = (H * x - Scalar(lam[i].first) * x).norm();
            out.eigenvalues.push_back(lam[i].first);
            out.residuals.push_back(res);
            if (res > tol) certified = false;
          }
          if (certified) {
            if (want_vectors) out.vectors = X.template cast<std::complex<double>>();
            return out;
          }
          if (exhausted) {
            std::ostringstream msg;
            msg << "shift-invert Lanczos not certified after " << used
                << " iterations; worst residual "
                << *std::max_element(out.residuals.begin(), out.residuals.end())
                << " exceeds " << tol;
            throw NoConvergence(msg.str());
          }
        } else if (exhausted) {
          std::ostringstream msg;
          msg << "shift-invert Lanczos basis exhausted after " << used
              << " iterations without " << k << " finite Ritz values";
          throw NoConvergence(msg.str());
        }
      }
    }
    if (exhausted && !ready) {
      if (b < 1e-13) {
        std::ostringstream msg;
        msg << "Lanczos breakdown after " << used << " iterations; invariant subspace smaller "
            << "than requested count";
        throw NoConvergence(msg.str());
      }
    }
    if (j + 1 < max_basis) V.col(j + 1) = w / b;
    beta.push_back(b);
  }
  throw NoConvergence("shift-invert Lanczos failed to converge");
}

}  // namespace

Spectrum eigensolve_dense(const Eigen::MatrixXd& H, int k, bool want_vectors) {
  return dense_impl(H, k, want_vectors);
}

Spectrum eigensolve_dense(const Eigen::MatrixXcd& H, int k, bool want_vectors) {
  return dense_impl(H, k, want_vectors);
}

Spectrum eigensolve_shift_invert(const Eigen::SparseMatrix<double>& H, int k, double sigma,
                                 std::uint64_t seed, bool want_vectors) {
  return shift_invert_impl(H, k, sigma, seed, want_vectors);
}

Spectrum eigensolve_shift_invert(const Eigen::SparseMatrix<std::complex<double>>& H, int k,
                                 double sigma, std::uint64_t seed, bool want_vectors) {
  return shift_invert_impl(H, k, sigma, seed, want_vectors);
}

}  // namespace tubular
