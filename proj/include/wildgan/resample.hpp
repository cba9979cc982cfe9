#pragma once

#include <algorithm>
#include <cmath>

#include "wildgan/tensor.hpp"

namespace wildgan {

// Bilinear resampling on [N,C,H,W], half-pixel centers, edges clamped.
// Identity (bit-exact) when the output size equals the input size: the
// source coordinate lands on a pixel center and the neighbor weight is 0.
template <typename T>
Tensor<T> resize_bilinear_nchw(const Tensor<T>& x, int oh, int ow) {
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (oh < 1 || ow < 1) throw ShapeError("resize_bilinear: empty target");
  Tensor<T> y({n, c, oh, ow});
  const double sy = static_cast<double>(h) / oh;
  const double sx = static_cast<double>(w) / ow;
  for (int r = 0; r < oh; ++r) {
    double fy = (r + 0.5) * sy - 0.5;
    fy = std::max(0.0, std::min(fy, static_cast<double>(h - 1)));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, h - 1);
    const T wy = static_cast<T>(fy - y0);
    for (int cc = 0; cc < ow; ++cc) {
      double fx = (cc + 0.5) * sx - 0.5;
      fx = std::max(0.0, std::min(fx, static_cast<double>(w - 1)));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, w - 1);
      const T wx = static_cast<T>(fx - x0);
      for (int i = 0; i < n; ++i)
        for (int ch = 0; ch < c; ++ch) {
          const T p00 = x.at4(i, ch, y0, x0);
          const T p01 = x.at4(i, ch, y0, x1);
          const T p10 = x.at4(i, ch, y1, x0);
          const T p11 = x.at4(i, ch, y1, x1);
          const T top = p00 + wx * (p01 - p00);
          const T bot = p10 + wx * (p11 - p10);
          y.at4(i, ch, r, cc) = top + wy * (bot - top);
        }
    }
  }
  return y;
}

// Nearest-neighbor resampling, same half-pixel convention.
template <typename T>
Tensor<T> resize_nearest_nchw(const Tensor<T>& x, int oh, int ow) {
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (oh < 1 || ow < 1) throw ShapeError("resize_nearest: empty target");
  Tensor<T> y({n, c, oh, ow});
  const double sy = static_cast<double>(h) / oh;
  const double sx = static_cast<double>(w) / ow;
  for (int r = 0; r < oh; ++r) {
    int ih = static_cast<int>((r + 0.5) * sy);
    ih = std::max(0, std::min(ih, h - 1));
    for (int cc = 0; cc < ow; ++cc) {
      int iw = static_cast<int>((cc + 0.5) * sx);
      iw = std::max(0, std::min(iw, w - 1));
      for (int i = 0; i < n; ++i)
        for (int ch = 0; ch < c; ++ch) y.at4(i, ch, r, cc) = x.at4(i, ch, ih, iw);
    }
  }
  return y;
}

}  // namespace wildgan
