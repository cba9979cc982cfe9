#pragma once

#include <array>
#include <vector>

namespace wildgan {

// Corner-format box in normalized image coordinates.
struct BoundingBox {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  double cx() const { return 0.5 * (xmin + xmax); }
  double cy() const { return 0.5 * (ymin + ymax); }
  double w() const { return xmax - xmin; }
  double h() const { return ymax - ymin; }
  double area() const { return w() * h(); }
};

struct Detection {
  BoundingBox box;
  int class_id = 0;  // index into the class vocabulary; 0 is background
  double confidence = 0;
};

// Throws ValidationError unless 0 <= min < max <= 1 on both axes.
void validate_box(const BoundingBox& b, const char* what = "box");

// Intersection area over union area, in [0,1].
double iou(const BoundingBox& a, const BoundingBox& b);

// Center-size offsets (dcx, dcy, dw, dh) of gt relative to an anchor:
// dcx=(cxg-cxa)/wa, dcy=(cyg-cya)/ha, dw=ln(wg/wa), dh=ln(hg/ha).
std::array<double, 4> encode_box(const BoundingBox& gt, const BoundingBox& anchor);

// Exact inverse of encode_box, clipped to [0,1].
BoundingBox decode_box(const std::array<double, 4>& offsets, const BoundingBox& anchor);

}  // namespace wildgan
