#pragma once

#include <vector>

#include "wildgan/boxes.hpp"

namespace wildgan {

// One feature map's anchor geometry: rows x cols cells, one box per aspect.
struct MapSpec {
  int rows = 0;
  int cols = 0;
  std::vector<double> aspects;
};

// Default boxes over all feature maps, with per-box provenance. Count is
// sum over maps of rows*cols*|aspects|.
struct AnchorSet {
  struct Provenance {
    int map = 0, row = 0, col = 0, aspect = 0;
  };
  std::vector<BoundingBox> boxes;
  std::vector<Provenance> provenance;
  std::vector<double> scales;                      // s_k per map
  std::vector<std::vector<double>> aspect_ratios;  // per map

  size_t size() const { return boxes.size(); }
};

// Scale of map k (0-based) out of m: s_min + (s_max-s_min)*k/(m-1); s_min when
// m == 1. Box at cell (r,c) with aspect a: center at cell center, size
// s_k*sqrt(a) x s_k/sqrt(a), corners clipped to [0,1].
AnchorSet build_default_boxes(const std::vector<MapSpec>& map_specs, double s_min,
                              double s_max);

}  // namespace wildgan
