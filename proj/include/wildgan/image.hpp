#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wildgan/tensor.hpp"

namespace wildgan {

// H x W x C image, row-major interleaved, every value in [-1, 1].
// Channels is 1 or 3.
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  ImageTensor() = default;
  ImageTensor(int h, int w, int c)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, 0.0f) {}

  float& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  size_t size() const { return data.size(); }
};

// Throws ValidationError unless dimensions, length and value range hold.
void validate_image(const ImageTensor& img, const std::string& what = "image");

// Synthetic "wild conditions": downscale, darken, noise. Applied in the fixed
// order downscale -> brightness -> noise -> clamp; brightness and noise act in
// linear [0,1] light. Deterministic for a given seed.
struct DegradationParams {
  double downscale_factor = 1.0;  // >= 1
  double brightness_scale = 1.0;  // (0, 1]
  double noise_sigma = 0.0;       // >= 0, linear-light units
  uint64_t seed = 0;
};

ImageTensor degrade(const ImageTensor& img, const DegradationParams& params);

// Exact area-average downscale; output dims floor(input/factor).
ImageTensor downscale_area(const ImageTensor& img, double factor);

ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w);
ImageTensor resize_nearest(const ImageTensor& img, int out_h, int out_w);

// Batch packing between the HWC image carrier and the engine's [N,C,H,W].
// Images must share dimensions. Single-channel images are replicated to the
// requested channel count when packing for 3-channel networks.
Tensor<float> pack_nchw(const std::vector<ImageTensor>& images, int want_channels = 3);
Tensor<float> pack_nchw_one(const ImageTensor& image, int want_channels = 3);
std::vector<ImageTensor> unpack_nchw(const Tensor<float>& batch);

// PNG I/O (lossless, 8-bit). Pixel p maps to p/127.5 - 1.
ImageTensor load_png(const std::string& path);
void save_png(const std::string& path, const ImageTensor& img);

}  // namespace wildgan
