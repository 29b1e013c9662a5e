#pragma once

// Gauss-Hermite quadrature oracle for oscillator matrix elements, independent of
// the ladder-operator construction in the library.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

struct GaussHermite {
  std::vector<double> x, w;
};

// Golub-Welsch nodes and weights for weight exp(-x^2)
inline GaussHermite gauss_hermite(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussHermite q;
  for (int i = 0; i < n; ++i) {
    q.x.push_back(es.eigenvalues()(i));
    double v0 = es.eigenvectors()(0, i);
    q.w.push_back(std::sqrt(M_PI) * v0 * v0);
  }
  return q;
}

// normalized Hermite polynomials h_0..h_nmax at x (orthonormal against exp(-x^2))
inline std::vector<double> hermite_normalized(int nmax, double x) {
  std::vector<double> h(nmax + 1);
  h[0] = std::pow(M_PI, -0.25);
  if (nmax >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int n = 1; n < nmax; ++n)
    h[n + 1] = std::sqrt(2.0 / (n + 1)) * x * h[n] - std::sqrt(double(n) / (n + 1)) * h[n - 1];
  return h;
}

// position and d/du matrices for oscillator functions of frequency omega
inline void hermite_matrices(int nmax, double omega, double hbar, Eigen::MatrixXd& U,
                             Eigen::MatrixXd& D) {
  int nq = 4 * (nmax + 2);
  GaussHermite q = gauss_hermite(nq);
  U.setZero(nmax + 1, nmax + 1);
  D.setZero(nmax + 1, nmax + 1);
  double s = std::sqrt(hbar / omega);  // u = s x
  for (int i = 0; i < nq; ++i) {
    double x = q.x[i], w = q.w[i];
    std::vector<double> h = hermite_normalized(nmax + 1, x);
    for (int m = 0; m <= nmax; ++m)
      for (int n = 0; n <= nmax; ++n) {
        U(m, n) += w * h[m] * x * h[n] * s;
        // psi_n'(x) = sqrt(2n) h_{n-1} - x h_n against weight
        double dpsi = (n > 0 ? std::sqrt(2.0 * n) * h[n - 1] : 0.0) - x * h[n];
        D(m, n) += w * h[m] * dpsi / s;
      }
  }
}

// Lambda_12 on product labels (n1, n2), n_i <= nmax; row-major index n1*(nmax+1)+n2
inline Eigen::MatrixXcd lambda_quadrature(int nmax, double w1, double w2, double hbar) {
  Eigen::MatrixXd U1, D1, U2, D2;
  hermite_matrices(nmax, w1, hbar, U1, D1);
  hermite_matrices(nmax, w2, hbar, U2, D2);
  int nl = nmax + 1;
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(nl * nl, nl * nl);
  std::complex<double> c(0.0, -hbar / 2.0);  // pi = -i hbar d/du, Lambda = (u1 pi2 - u2 pi1)/2
  for (int m1 = 0; m1 < nl; ++m1)
    for (int m2 = 0; m2 < nl; ++m2)
      for (int n1 = 0; n1 < nl; ++n1)
        for (int n2 = 0; n2 < nl; ++n2)
          L(m1 * nl + m2, n1 * nl + n2) =
              c * (U1(m1, n1) * D2(m2, n2) - U2(m2, n2) * D1(m1, n1));
  return L;
}

}  // namespace oracle
