#include "wildgan/enhancer.hpp"

#include <algorithm>
#include <cmath>

#include "wildgan/error.hpp"
#include "wildgan/resample.hpp"

namespace wildgan {

namespace {

constexpr int kTileOverlap = 8;

// Refine an already-resized frame tile by tile. Each tile runs the full
// residual pass; overlap regions blend with linear ramp weights.
Tensor<float> refine_tiled(ConditionalGenerator<float>& g, const Tensor<float>& resized,
                           int tile) {
  const int h = resized.dim(2), w = resized.dim(3);
  Tensor<float> acc({1, 3, h, w});
  Tensor<float> wsum({1, 1, h, w});

  const int step = std::max(1, tile - kTileOverlap);
  for (int ty = 0; ty < h; ty += step) {
    const int y0 = std::min(ty, std::max(0, h - tile));
    const int y1 = std::min(h, y0 + tile);
    for (int tx = 0; tx < w; tx += step) {
      const int x0 = std::min(tx, std::max(0, w - tile));
      const int x1 = std::min(w, x0 + tile);
      Tensor<float> patch({1, 3, y1 - y0, x1 - x0});
      for (int c = 0; c < 3; ++c)
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x)
            patch.at4(0, c, y - y0, x - x0) = resized.at4(0, c, y, x);
      Tensor<float> out = g.forward_at(patch, y1 - y0, x1 - x0, /*train=*/false);
      for (int y = y0; y < y1; ++y) {
        const float wy = 1.0f + std::min({y - y0, y1 - 1 - y, kTileOverlap});
        for (int x = x0; x < x1; ++x) {
          const float wt = wy * (1.0f + std::min({x - x0, x1 - 1 - x, kTileOverlap}));
          wsum.at4(0, 0, y, x) += wt;
          for (int c = 0; c < 3; ++c)
            acc.at4(0, c, y, x) += wt * out.at4(0, c, y - y0, x - x0);
        }
      }
      if (x1 == w) break;
    }
    if (y1 == h) break;
  }
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const float v = acc.at4(0, c, y, x) / wsum.at4(0, 0, y, x);
        acc.at4(0, c, y, x) = std::clamp(v, -1.0f, 1.0f);
      }
  return acc;
}

}  // namespace

ImageTensor enhance_frame(ConditionalGenerator<float>& g, const ImageTensor& frame,
                          const EnhanceSpec& spec) {
  validate_image(frame, "enhance_frame input");
  if (spec.target_width < frame.width || spec.target_height < frame.height)
    throw ValidationError("enhance_frame: target " + std::to_string(spec.target_width) +
                          "x" + std::to_string(spec.target_height) +
                          " smaller than input " + std::to_string(frame.width) + "x" +
                          std::to_string(frame.height));
  Tensor<float> x = pack_nchw_one(frame);
  Tensor<float> y;
  if (spec.tile_size > 0 &&
      (spec.target_height > spec.tile_size || spec.target_width > spec.tile_size)) {
    Tensor<float> resized = resize_bilinear_nchw(x, spec.target_height, spec.target_width);
    y = refine_tiled(g, resized, spec.tile_size);
  } else {
    y = g.forward_at(x, spec.target_height, spec.target_width, /*train=*/false);
  }
  return unpack_nchw(y)[0];
}

std::vector<ImageTensor> enhance_stream(ConditionalGenerator<float>& g,
                                        const std::vector<ImageTensor>& frames,
                                        const EnhanceSpec& spec) {
  std::vector<ImageTensor> out;
  out.reserve(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    try {
      out.push_back(enhance_frame(g, frames[i], spec));
    } catch (const std::runtime_error& e) {
      throw ValidationError("enhance_stream: frame " + std::to_string(i) + ": " +
                            e.what());
    }
  }
  return out;
}

}  // namespace wildgan
