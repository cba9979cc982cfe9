#include "wildgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "wildgan/error.hpp"

namespace wildgan {

using nlohmann::json;

double psnr(const ImageTensor& a, const ImageTensor& b) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels)
    throw ShapeError("psnr: image shapes differ");
  double mse = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(4.0 / mse);  // peak = 2 for the [-1,1] range
}

namespace {

struct RankedDet {
  size_t frame;
  size_t index_in_frame;
  const Detection* det;
};

// detections of one class across frames, confidence-descending, stable in
// input order
std::vector<RankedDet> ranked_class_dets(const std::vector<FrameDetections>& dets,
                                         int class_id) {
  std::vector<RankedDet> out;
  for (size_t f = 0; f < dets.size(); ++f)
    for (size_t i = 0; i < dets[f].detections.size(); ++i)
      if (dets[f].detections[i].class_id == class_id)
        out.push_back({f, i, &dets[f].detections[i]});
  std::stable_sort(out.begin(), out.end(), [](const RankedDet& a, const RankedDet& b) {
    return a.det->confidence > b.det->confidence;
  });
  return out;
}

}  // namespace

double average_precision(const std::vector<FrameDetections>& dets,
                         const std::vector<Annotation>& gts,
                         const std::vector<std::string>& vocabulary,
                         const std::string& class_label, double iou_threshold) {
  const auto vit = std::find(vocabulary.begin(), vocabulary.end(), class_label);
  if (vit == vocabulary.end())
    throw ValidationError("average_precision: unknown class '" + class_label + "'");
  const int class_id = static_cast<int>(vit - vocabulary.begin());

  // gt boxes of this class per image id
  std::map<std::string, std::vector<BoundingBox>> gt_boxes;
  int total_gt = 0;
  for (const auto& a : gts) {
    auto boxes = normalized_gt_boxes(a);
    for (size_t i = 0; i < a.objects.size(); ++i)
      if (a.objects[i].class_label == class_label) {
        gt_boxes[a.image_id].push_back(boxes[i]);
        ++total_gt;
      }
  }
  if (total_gt == 0)
    throw ValidationError("average_precision: class '" + class_label +
                          "' absent from ground truth");

  std::map<std::string, std::vector<char>> used;
  for (auto& [id, boxes] : gt_boxes) used[id].assign(boxes.size(), 0);

  const auto ranked = ranked_class_dets(dets, class_id);
  std::vector<double> precision, recall;
  int tp = 0, fp = 0;
  for (const auto& rd : ranked) {
    const std::string& id = dets[rd.frame].image_id;
    int best = -1;
    double best_iou = 0;
    auto git = gt_boxes.find(id);
    if (git != gt_boxes.end()) {
      for (size_t gi = 0; gi < git->second.size(); ++gi) {
        if (used[id][gi]) continue;
        const double v = iou(rd.det->box, git->second[gi]);
        if (v > best_iou) {
          best_iou = v;
          best = static_cast<int>(gi);
        }
      }
    }
    if (best >= 0 && best_iou >= iou_threshold) {
      used[id][static_cast<size_t>(best)] = 1;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / (tp + fp));
    recall.push_back(static_cast<double>(tp) / total_gt);
  }

  // all-point interpolation: precision at recall r is the max precision at
  // any recall >= r; AP is the exact area under that envelope
  double ap = 0, prev_recall = 0;
  for (size_t i = 0; i < recall.size(); ++i) {
    double max_prec = 0;
    for (size_t j = i; j < precision.size(); ++j) max_prec = std::max(max_prec, precision[j]);
    ap += (recall[i] - prev_recall) * max_prec;
    prev_recall = recall[i];
  }
  return ap;
}

double recall_at_iou(const std::vector<FrameDetections>& dets,
                     const std::vector<Annotation>& gts, double iou_thr) {
  int total_gt = 0, covered = 0;
  for (const auto& a : gts) total_gt += static_cast<int>(a.objects.size());
  if (total_gt == 0) throw ValidationError("recall_at_iou: no ground-truth objects");

  std::vector<std::string> vocab = class_vocabulary(gts);
  for (const auto& a : gts) {
    const FrameDetections* fd = nullptr;
    for (const auto& d : dets)
      if (d.image_id == a.image_id) {
        fd = &d;
        break;
      }
    const auto boxes = normalized_gt_boxes(a);
    const auto cls = gt_class_ids(a, vocab);
    std::vector<char> used_det;
    if (fd) used_det.assign(fd->detections.size(), 0);
    // greedy: highest-confidence detections claim gts first
    std::vector<size_t> order;
    if (fd) {
      order.resize(fd->detections.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        return fd->detections[x].confidence > fd->detections[y].confidence;
      });
    }
    std::vector<char> gt_used(boxes.size(), 0);
    for (size_t oi = 0; fd && oi < order.size(); ++oi) {
      const Detection& det = fd->detections[order[oi]];
      int best = -1;
      double best_iou = 0;
      for (size_t gi = 0; gi < boxes.size(); ++gi) {
        if (gt_used[gi] || cls[gi] != det.class_id) continue;
        const double v = iou(det.box, boxes[gi]);
        if (v > best_iou) {
          best_iou = v;
          best = static_cast<int>(gi);
        }
      }
      if (best >= 0 && best_iou >= iou_thr) {
        gt_used[static_cast<size_t>(best)] = 1;
        ++covered;
      }
    }
  }
  return static_cast<double>(covered) / total_gt;
}

EvalReport mean_average_precision(const std::vector<FrameDetections>& dets,
                                  const std::vector<Annotation>& gts,
                                  double iou_threshold) {
  if (gts.empty()) throw ValidationError("mean_average_precision: empty ground truth");
  std::vector<std::string> vocab = class_vocabulary(gts);
  if (vocab.empty())
    throw ValidationError("mean_average_precision: ground truth has no objects");
  EvalReport report;
  double sum = 0;
  for (const auto& cls : vocab) {
    const double ap = average_precision(dets, gts, vocab, cls, iou_threshold);
    report.per_class_ap[cls] = ap;
    sum += ap;
  }
  report.map_score = sum / static_cast<double>(vocab.size());
  report.recall_at_iou = recall_at_iou(dets, gts, iou_threshold);
  return report;
}

json eval_report_to_json(const EvalReport& r) {
  json j;
  j["per_class_ap"] = r.per_class_ap;
  j["map"] = r.map_score;
  j["recall_at_iou"] = r.recall_at_iou;
  if (r.psnr_stats) {
    auto fmt = [](double v) -> json {
      if (std::isinf(v)) return "inf";
      return v;
    };
    j["psnr"] = {{"mean", fmt(r.psnr_stats->mean)},
                 {"min", fmt(r.psnr_stats->min)},
                 {"max", fmt(r.psnr_stats->max)}};
  }
  if (!r.fingerprint.is_null()) j["fingerprint"] = r.fingerprint;
  return j;
}

PipelineComparison compare_pipelines(DetectorModel& model, ConditionalGenerator<float>& g,
                                     const std::vector<ImageTensor>& frames,
                                     const std::vector<Annotation>& annotations,
                                     const EnhanceSpec& spec,
                                     const DetectThresholds& thr) {
  if (frames.empty()) throw ValidationError("compare_pipelines: empty test set");
  if (frames.size() != annotations.size())
    throw ValidationError("compare_pipelines: frames and annotations must align 1:1");

  std::vector<FrameDetections> base_dets, casc_dets;
  PipelineComparison cmp;
  cmp.per_image_csv_rows.push_back("image,baseline_recall,cascade_recall");
  for (size_t i = 0; i < frames.size(); ++i) {
    const std::string& id = annotations[i].image_id;
    base_dets.push_back({id, detect(model, frames[i], thr)});
    casc_dets.push_back({id, detect_cascade(g, model, frames[i], spec, thr)});
    const std::vector<Annotation> one{annotations[i]};
    const double rb = recall_at_iou({base_dets.back()}, one, thr.match_iou);
    const double rc = recall_at_iou({casc_dets.back()}, one, thr.match_iou);
    cmp.per_image_csv_rows.push_back(id + "," + std::to_string(rb) + "," +
                                     std::to_string(rc));
  }

  json fingerprint{{"confidence", thr.confidence},
                   {"nms_iou", thr.nms_iou},
                   {"top_k", thr.top_k},
                   {"iou", thr.match_iou},
                   {"enhance_target",
                    {spec.target_width, spec.target_height}}};
  cmp.baseline = mean_average_precision(base_dets, annotations, thr.match_iou);
  cmp.baseline.fingerprint = fingerprint;
  cmp.cascade = mean_average_precision(casc_dets, annotations, thr.match_iou);
  cmp.cascade.fingerprint = fingerprint;
  cmp.delta_recall = cmp.cascade.recall_at_iou - cmp.baseline.recall_at_iou;
  cmp.delta_map = cmp.cascade.map_score - cmp.baseline.map_score;
  return cmp;
}

}  // namespace wildgan
