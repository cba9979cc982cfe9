#include "wildgan/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wildgan/error.hpp"

namespace wildgan {

void validate_box(const BoundingBox& b, const char* what) {
  if (!(b.xmin >= 0 && b.xmin < b.xmax && b.xmax <= 1 && b.ymin >= 0 &&
        b.ymin < b.ymax && b.ymax <= 1))
    throw ValidationError(std::string(what) + ": corners must satisfy 0 <= min < max <= 1");
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double iy = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (ix <= 0 || iy <= 0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

std::array<double, 4> encode_box(const BoundingBox& gt, const BoundingBox& anchor) {
  if (anchor.w() <= 0 || anchor.h() <= 0)
    throw NumericError("encode_box: zero-size anchor");
  if (gt.w() <= 0 || gt.h() <= 0) throw NumericError("encode_box: zero-size box");
  return {(gt.cx() - anchor.cx()) / anchor.w(), (gt.cy() - anchor.cy()) / anchor.h(),
          std::log(gt.w() / anchor.w()), std::log(gt.h() / anchor.h())};
}

BoundingBox decode_box(const std::array<double, 4>& offsets, const BoundingBox& anchor) {
  for (double v : offsets)
    if (!std::isfinite(v)) throw NumericError("decode_box: non-finite offsets");
  const double cx = anchor.cx() + offsets[0] * anchor.w();
  const double cy = anchor.cy() + offsets[1] * anchor.h();
  const double w = anchor.w() * std::exp(offsets[2]);
  const double h = anchor.h() * std::exp(offsets[3]);
  BoundingBox b{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
  b.xmin = std::clamp(b.xmin, 0.0, 1.0);
  b.ymin = std::clamp(b.ymin, 0.0, 1.0);
  b.xmax = std::clamp(b.xmax, 0.0, 1.0);
  b.ymax = std::clamp(b.ymax, 0.0, 1.0);
  return b;
}

}  // namespace wildgan
