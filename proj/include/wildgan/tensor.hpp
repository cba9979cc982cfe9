#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "wildgan/error.hpp"

namespace wildgan {

// Dense row-major n-d array. Batches of images are [N, C, H, W]; matrices
// [rows, cols]. Plain value type, cheap to move.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(numel_of(shape)), T(0));
  }

  static int64_t numel_of(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  bool empty() const { return data.empty(); }

  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  int ndim() const { return static_cast<int>(shape.size()); }

  // [N, C, H, W] accessors
  T& at4(int n, int c, int h, int w) {
    return data[((static_cast<size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }
  const T& at4(int n, int c, int h, int w) const {
    return data[((static_cast<size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }

  // [N, D] accessors
  T& at2(int n, int d) { return data[static_cast<size_t>(n) * shape[1] + d]; }
  const T& at2(int n, int d) const { return data[static_cast<size_t>(n) * shape[1] + d]; }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  Tensor<T> reshaped(std::vector<int> s) const {
    if (numel_of(s) != numel())
      throw ShapeError("reshape: element count mismatch");
    Tensor<T> out;
    out.shape = std::move(s);
    out.data = data;
    return out;
  }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i)
      s += (i ? "," : "") + std::to_string(shape[i]);
    return s + "]";
  }
};

template <typename T>
bool same_shape(const Tensor<T>& a, const Tensor<T>& b) {
  return a.shape == b.shape;
}

}  // namespace wildgan
