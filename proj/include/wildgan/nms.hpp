#pragma once

#include <vector>

#include "wildgan/boxes.hpp"

namespace wildgan {

// Greedy per-class suppression: repeatedly keep the highest-confidence
// remaining detection and drop same-class detections with IoU > threshold
// against it. Confidence ties break toward the lower input index. At most
// top_k survivors overall, sorted by descending confidence (same tie-break).
std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_threshold,
                           int top_k);

}  // namespace wildgan
