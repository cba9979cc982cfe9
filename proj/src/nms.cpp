#include "wildgan/nms.hpp"

#include <algorithm>
#include <numeric>

#include "wildgan/error.hpp"

namespace wildgan {

std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_threshold,
                           int top_k) {
  if (top_k < 0) throw ValidationError("nms: top_k must be >= 0");
  for (const auto& d : dets)
    if (!(d.confidence >= 0 && d.confidence <= 1))
      throw ValidationError("nms: confidence outside [0,1]");

  std::vector<size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (dets[a].confidence != dets[b].confidence)
      return dets[a].confidence > dets[b].confidence;
    return a < b;
  });

  std::vector<char> suppressed(dets.size(), 0);
  std::vector<Detection> kept;
  for (size_t oi = 0; oi < order.size(); ++oi) {
    const size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(dets[i]);
    if (static_cast<int>(kept.size()) == top_k) break;
    for (size_t oj = oi + 1; oj < order.size(); ++oj) {
      const size_t j = order[oj];
      if (suppressed[j] || dets[j].class_id != dets[i].class_id) continue;
      if (iou(dets[i].box, dets[j].box) > iou_threshold) suppressed[j] = 1;
    }
  }
  return kept;
}

}  // namespace wildgan
