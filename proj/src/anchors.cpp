#include "wildgan/anchors.hpp"

#include <algorithm>
#include <cmath>

#include "wildgan/error.hpp"

namespace wildgan {

AnchorSet build_default_boxes(const std::vector<MapSpec>& map_specs, double s_min,
                              double s_max) {
  if (map_specs.empty()) throw ValidationError("build_default_boxes: no feature maps");
  if (!(s_min > 0 && s_min < 1 && s_max > 0 && s_max < 1 && s_min < s_max))
    throw ValidationError("build_default_boxes: need 0 < s_min < s_max < 1");
  for (const auto& m : map_specs)
    if (m.rows < 1 || m.cols < 1 || m.aspects.empty())
      throw ValidationError("build_default_boxes: invalid map spec");

  AnchorSet set;
  const int m = static_cast<int>(map_specs.size());
  for (int k = 0; k < m; ++k) {
    const double sk = m == 1 ? s_min : s_min + (s_max - s_min) * k / (m - 1);
    set.scales.push_back(sk);
    set.aspect_ratios.push_back(map_specs[k].aspects);
    const MapSpec& spec = map_specs[k];
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) {
        const double cy = (r + 0.5) / spec.rows;
        const double cx = (c + 0.5) / spec.cols;
        for (int a = 0; a < static_cast<int>(spec.aspects.size()); ++a) {
          const double ar = spec.aspects[a];
          if (ar <= 0) throw ValidationError("build_default_boxes: aspect must be > 0");
          const double w = sk * std::sqrt(ar);
          const double h = sk / std::sqrt(ar);
          BoundingBox b{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
          b.xmin = std::clamp(b.xmin, 0.0, 1.0);
          b.ymin = std::clamp(b.ymin, 0.0, 1.0);
          b.xmax = std::clamp(b.xmax, 0.0, 1.0);
          b.ymax = std::clamp(b.ymax, 0.0, 1.0);
          set.boxes.push_back(b);
          set.provenance.push_back({k, r, c, a});
        }
      }
    }
  }
  return set;
}

}  // namespace wildgan
