#include "wildgan/matching.hpp"

#include "wildgan/error.hpp"

namespace wildgan {

MatchResult match_anchors(const std::vector<BoundingBox>& gts, const AnchorSet& anchors,
                          double iou_threshold) {
  if (anchors.size() == 0) throw ValidationError("match_anchors: empty anchor set");
  const size_t na = anchors.size(), ng = gts.size();
  MatchResult res;
  res.anchor_to_gt.assign(na, -1);
  res.anchor_offsets.assign(na, {0, 0, 0, 0});
  if (ng == 0) return res;
  if (ng > na)
    throw ValidationError("match_anchors: more ground truths than anchors");
  for (const auto& g : gts) validate_box(g, "match_anchors gt");

  std::vector<std::vector<double>> overlap(ng, std::vector<double>(na));
  for (size_t gi = 0; gi < ng; ++gi)
    for (size_t ai = 0; ai < na; ++ai) overlap[gi][ai] = iou(gts[gi], anchors.boxes[ai]);

  // step 1: each gt claims its best unclaimed anchor
  for (size_t gi = 0; gi < ng; ++gi) {
    int best = -1;
    double best_iou = -1.0;
    for (size_t ai = 0; ai < na; ++ai) {
      if (res.anchor_to_gt[ai] != -1) continue;
      if (overlap[gi][ai] > best_iou) {
        best_iou = overlap[gi][ai];
        best = static_cast<int>(ai);
      }
    }
    res.anchor_to_gt[static_cast<size_t>(best)] = static_cast<int>(gi);
  }

  // step 2: remaining anchors above the threshold join their best gt
  for (size_t ai = 0; ai < na; ++ai) {
    if (res.anchor_to_gt[ai] != -1) continue;
    int best = -1;
    double best_iou = 0.0;
    for (size_t gi = 0; gi < ng; ++gi) {
      if (overlap[gi][ai] > best_iou) {
        best_iou = overlap[gi][ai];
        best = static_cast<int>(gi);
      }
    }
    if (best >= 0 && best_iou >= iou_threshold) res.anchor_to_gt[ai] = best;
  }

  for (size_t ai = 0; ai < na; ++ai) {
    const int gi = res.anchor_to_gt[ai];
    if (gi < 0) continue;
    res.anchor_offsets[ai] = encode_box(gts[static_cast<size_t>(gi)], anchors.boxes[ai]);
    ++res.num_matched;
  }
  return res;
}

}  // namespace wildgan
