#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <new>
#include <stdexcept>
#include <vector>

namespace stkde {

// 64-byte aligned allocator so array buffers can be handed to FFTW's
// new-array execute interface without copies.
template <class T>
struct AlignedAlloc {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  AlignedAlloc() = default;
  template <class U>
  AlignedAlloc(const AlignedAlloc<U>&) {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = std::aligned_alloc(alignment, ((n * sizeof(T) + alignment - 1) / alignment) * alignment);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const AlignedAlloc<U>&) const { return true; }
};

template <class T>
using aligned_vector = std::vector<T, AlignedAlloc<T>>;

// Dense rank-1/2/3 array of doubles, row-major with the last axis fastest.
// Unused trailing dimensions are fixed to 1 so lower-rank grids (temporal
// profiles, spatial slabs) share one representation.
class GridArray {
 public:
  GridArray() = default;
  GridArray(std::array<int, 3> dims, int rank) : dims_(dims), rank_(rank) {
    if (rank < 1 || rank > 3) throw std::invalid_argument("GridArray: rank must be 1, 2 or 3");
    for (int a = 0; a < 3; ++a) {
      if (a < rank && dims_[a] < 1) throw std::invalid_argument("GridArray: dims must be positive");
      if (a >= rank) dims_[a] = 1;
    }
    v_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], 0.0);
  }

  int rank() const { return rank_; }
  const std::array<int, 3>& dims() const { return dims_; }
  int dim(int a) const { return dims_[a]; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  std::size_t index(int i, int j = 0, int k = 0) const {
    return (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k;
  }
  double& at(int i, int j = 0, int k = 0) { return v_[index(i, j, k)]; }
  double at(int i, int j = 0, int k = 0) const { return v_[index(i, j, k)]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  double sum() const {
    double s = 0;
    for (double x : v_) s += x;
    return s;
  }
  double max_abs() const {
    double s = 0;
    for (double x : v_) s = std::max(s, std::abs(x));
    return s;
  }

  bool same_shape(const GridArray& o) const { return rank_ == o.rank_ && dims_ == o.dims_; }

 private:
  std::array<int, 3> dims_{1, 1, 1};
  int rank_ = 3;
  aligned_vector<double> v_;
};

}  // namespace stkde
