#pragma once

#include <cassert>
#include <vector>

namespace tubular {

// Dense rank-3 array with value semantics, zero-initialized.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int n0, int n1, int n2) : n_{n0, n1, n2}, v_(static_cast<size_t>(n0) * n1 * n2, 0.0) {}

  double& operator()(int i, int j, int k) { return v_[idx(i, j, k)]; }
  double operator()(int i, int j, int k) const { return v_[idx(i, j, k)]; }

  int dim(int axis) const { return n_[axis]; }
  bool empty() const { return v_.empty(); }

 private:
  size_t idx(int i, int j, int k) const {
    assert(i >= 0 && i < n_[0] && j >= 0 && j < n_[1] && k >= 0 && k < n_[2]);
    return (static_cast<size_t>(i) * n_[1] + j) * n_[2] + k;
  }
  int n_[3] = {0, 0, 0};
  std::vector<double> v_;
};

// Dense rank-4 array, zero-initialized.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : Tensor4(n, n, n, n) {}
  Tensor4(int n0, int n1, int n2, int n3)
      : n_{n0, n1, n2, n3}, v_(static_cast<size_t>(n0) * n1 * n2 * n3, 0.0) {}

  double& operator()(int i, int j, int k, int l) { return v_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return v_[idx(i, j, k, l)]; }

  int dim(int axis) const { return n_[axis]; }
  bool empty() const { return v_.empty(); }

 private:
  size_t idx(int i, int j, int k, int l) const {
    assert(i >= 0 && i < n_[0] && j >= 0 && j < n_[1] && k >= 0 && k < n_[2] && l >= 0 && l < n_[3]);
    return ((static_cast<size_t>(i) * n_[1] + j) * n_[2] + k) * n_[3] + l;
  }
  int n_[4] = {0, 0, 0, 0};
  std::vector<double> v_;
};

}  // namespace tubular
