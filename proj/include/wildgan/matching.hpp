#pragma once

#include <array>
#include <vector>

#include "wildgan/anchors.hpp"
#include "wildgan/boxes.hpp"

namespace wildgan {

// Anchor-to-ground-truth assignment and encoded regression targets.
// anchor_to_gt[i] is the gt index or -1 for background.
struct MatchResult {
  std::vector<int> anchor_to_gt;
  std::vector<std::array<double, 4>> anchor_offsets;  // valid where matched
  int num_matched = 0;
};

// Two-step assignment: (1) every gt claims its best-IoU anchor, gts processed
// in index order, per-gt ties broken by lowest anchor index; a gt whose best
// anchor is already claimed takes its best unclaimed anchor. (2) every
// remaining anchor with IoU >= threshold joins its best gt (ties to the lower
// gt index). Guarantees each gt >= 1 anchor; requires |anchors| >= |gts|.
MatchResult match_anchors(const std::vector<BoundingBox>& gts, const AnchorSet& anchors,
                          double iou_threshold = 0.5);

}  // namespace wildgan
