#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace tubular {

// Lowest part of a Hermitian spectrum with certified residuals.
struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXcd vectors;         // one column per eigenvalue; empty if not requested
  std::string method;
  int iterations = 0;
  std::vector<double> residuals;  // ||H v - lambda v||_2 per reported pair
};

inline constexpr int kDenseLimit = 4096;
inline constexpr std::uint64_t kDefaultSeed = 0x51a3c2b7u;
inline constexpr double kResidualTol = 1e-9;  // relative to ||H||_inf

Spectrum eigensolve_dense(const Eigen::MatrixXd& H, int k, bool want_vectors = true);
Spectrum eigensolve_dense(const Eigen::MatrixXcd& H, int k, bool want_vectors = true);

// Eigenvalues nearest above sigma via shift-invert Lanczos with full
// reorthogonalization. Deterministic for a fixed seed.
Spectrum eigensolve_shift_invert(const Eigen::SparseMatrix<double>& H, int k, double sigma,
                                 std::uint64_t seed = kDefaultSeed, bool want_vectors = true);
Spectrum eigensolve_shift_invert(const Eigen::SparseMatrix<std::complex<double>>& H, int k,
                                 double sigma, std::uint64_t seed = kDefaultSeed,
                                 bool want_vectors = true);

}  // namespace tubular
