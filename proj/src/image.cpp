#include "wildgan/image.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

#include "wildgan/error.hpp"
#include "wildgan/resample.hpp"
#include "wildgan/rng.hpp"

namespace wildgan {

void validate_image(const ImageTensor& img, const std::string& what) {
  if (img.height < 1 || img.width < 1)
    throw ValidationError(what + ": empty dimensions");
  if (img.channels != 1 && img.channels != 3)
    throw ValidationError(what + ": channels must be 1 or 3");
  if (img.data.size() != static_cast<size_t>(img.height) * img.width * img.channels)
    throw ValidationError(what + ": data length != h*w*c");
  for (float v : img.data)
    if (!(v >= -1.0f && v <= 1.0f))
      throw ValidationError(what + ": pixel outside [-1,1]");
}

ImageTensor downscale_area(const ImageTensor& img, double factor) {
  if (factor < 1.0) throw ValidationError("downscale_area: factor must be >= 1");
  if (factor == 1.0) return img;
  const int oh = static_cast<int>(std::floor(img.height / factor));
  const int ow = static_cast<int>(std::floor(img.width / factor));
  if (oh < 1 || ow < 1)
    throw ValidationError("downscale_area: output dimension would be zero");
  ImageTensor out(oh, ow, img.channels);
  const double sy = static_cast<double>(img.height) / oh;
  const double sx = static_cast<double>(img.width) / ow;
  for (int r = 0; r < oh; ++r) {
    const double y0 = r * sy, y1 = (r + 1) * sy;
    const int iy0 = static_cast<int>(y0);
    const int iy1 = std::min(img.height - 1, static_cast<int>(std::ceil(y1)) - 1);
    for (int c = 0; c < ow; ++c) {
      const double x0 = c * sx, x1 = (c + 1) * sx;
      const int ix0 = static_cast<int>(x0);
      const int ix1 = std::min(img.width - 1, static_cast<int>(std::ceil(x1)) - 1);
      for (int ch = 0; ch < img.channels; ++ch) {
        double acc = 0.0, area = 0.0;
        for (int y = iy0; y <= iy1; ++y) {
          const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
          for (int x = ix0; x <= ix1; ++x) {
            const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
            acc += wy * wx * img.at(y, x, ch);
            area += wy * wx;
          }
        }
        out.at(r, c, ch) = static_cast<float>(acc / area);
      }
    }
  }
  return out;
}

ImageTensor degrade(const ImageTensor& img, const DegradationParams& params) {
  validate_image(img, "degrade input");
  if (params.downscale_factor < 1.0)
    throw ValidationError("degrade: downscale_factor must be >= 1");
  if (!(params.brightness_scale > 0.0 && params.brightness_scale <= 1.0))
    throw ValidationError("degrade: brightness_scale must be in (0,1]");
  if (params.noise_sigma < 0.0)
    throw ValidationError("degrade: noise sigma must be >= 0");

  ImageTensor out = downscale_area(img, params.downscale_factor);
  if (params.brightness_scale == 1.0 && params.noise_sigma == 0.0)
    return out;  // identity photometry; keeps the no-op case bit-exact

  Rng rng(params.seed);
  for (float& v : out.data) {
    double l = (static_cast<double>(v) + 1.0) * 0.5;  // linear [0,1] light
    l *= params.brightness_scale;
    if (params.noise_sigma > 0.0) l += params.noise_sigma * rng.gaussian();
    v = static_cast<float>(std::clamp(2.0 * l - 1.0, -1.0, 1.0));
  }
  return out;
}

ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w) {
  Tensor<float> t = pack_nchw_one(img, img.channels);
  Tensor<float> r = resize_bilinear_nchw(t, out_h, out_w);
  return unpack_nchw(r)[0];
}

ImageTensor resize_nearest(const ImageTensor& img, int out_h, int out_w) {
  Tensor<float> t = pack_nchw_one(img, img.channels);
  Tensor<float> r = resize_nearest_nchw(t, out_h, out_w);
  return unpack_nchw(r)[0];
}

Tensor<float> pack_nchw(const std::vector<ImageTensor>& images, int want_channels) {
  if (images.empty()) throw ValidationError("pack_nchw: empty batch");
  const int h = images[0].height, w = images[0].width;
  Tensor<float> out({static_cast<int>(images.size()), want_channels, h, w});
  for (size_t n = 0; n < images.size(); ++n) {
    const ImageTensor& img = images[n];
    if (img.height != h || img.width != w)
      throw ShapeError("pack_nchw: inconsistent image sizes in batch");
    if (img.channels != want_channels && img.channels != 1)
      throw ShapeError("pack_nchw: cannot map " + std::to_string(img.channels) +
                       " channels to " + std::to_string(want_channels));
    for (int c = 0; c < want_channels; ++c) {
      const int src_c = img.channels == 1 ? 0 : c;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          out.at4(static_cast<int>(n), c, y, x) = img.at(y, x, src_c);
    }
  }
  return out;
}

Tensor<float> pack_nchw_one(const ImageTensor& image, int want_channels) {
  return pack_nchw({image}, want_channels);
}

std::vector<ImageTensor> unpack_nchw(const Tensor<float>& batch) {
  if (batch.ndim() != 4) throw ShapeError("unpack_nchw: expected [N,C,H,W]");
  std::vector<ImageTensor> out;
  const int n = batch.dim(0), c = batch.dim(1), h = batch.dim(2), w = batch.dim(3);
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    ImageTensor img(h, w, c);
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(y, x, ch) = batch.at4(i, ch, y, x);
    out.push_back(std::move(img));
  }
  return out;
}

ImageTensor load_png(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError("cannot read image: " + path);
  if (m.depth() != CV_8U) throw IoError("unsupported bit depth (want 8-bit): " + path);
  if (m.channels() == 4) {
    cv::Mat bgr(m.rows, m.cols, CV_8UC3);
    for (int y = 0; y < m.rows; ++y)
      for (int x = 0; x < m.cols; ++x) {
        const cv::Vec4b px = m.at<cv::Vec4b>(y, x);
        bgr.at<cv::Vec3b>(y, x) = cv::Vec3b(px[0], px[1], px[2]);
      }
    m = bgr;
  }
  const int ch = m.channels() == 1 ? 1 : 3;
  ImageTensor img(m.rows, m.cols, ch);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) {
      if (ch == 1) {
        img.at(y, x, 0) = m.at<uint8_t>(y, x) / 127.5f - 1.0f;
      } else {
        const cv::Vec3b px = m.at<cv::Vec3b>(y, x);  // BGR
        img.at(y, x, 0) = px[2] / 127.5f - 1.0f;
        img.at(y, x, 1) = px[1] / 127.5f - 1.0f;
        img.at(y, x, 2) = px[0] / 127.5f - 1.0f;
      }
    }
  return img;
}

void save_png(const std::string& path, const ImageTensor& img) {
  validate_image(img, "save_png");
  cv::Mat m(img.height, img.width, img.channels == 1 ? CV_8UC1 : CV_8UC3);
  auto to_u8 = [](float v) {
    return static_cast<uint8_t>(
        std::clamp(std::lround((v + 1.0f) * 127.5f), 0L, 255L));
  };
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      if (img.channels == 1) {
        m.at<uint8_t>(y, x) = to_u8(img.at(y, x, 0));
      } else {
        m.at<cv::Vec3b>(y, x) =
            cv::Vec3b(to_u8(img.at(y, x, 2)), to_u8(img.at(y, x, 1)),
                      to_u8(img.at(y, x, 0)));
      }
    }
  if (!cv::imwrite(path, m)) throw IoError("cannot write image: " + path);
}

}  // namespace wildgan
