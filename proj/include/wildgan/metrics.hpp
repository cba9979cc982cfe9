#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wildgan/annotations.hpp"
#include "wildgan/boxes.hpp"
#include "wildgan/detector.hpp"
#include "wildgan/image.hpp"

namespace wildgan {

// Detections produced for one image, keyed by the annotation image id.
struct FrameDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

struct PsnrStats {
  double mean = 0, min = 0, max = 0;
};

struct EvalReport {
  std::map<std::string, double> per_class_ap;
  double map_score = 0;
  double recall_at_iou = 0;
  std::optional<PsnrStats> psnr_stats;
  nlohmann::json fingerprint;  // seeds, thresholds
};

nlohmann::json eval_report_to_json(const EvalReport& r);

// 10*log10(peak^2 / MSE) with peak 2.0; +inf for identical images.
double psnr(const ImageTensor& a, const ImageTensor& b);

// All-point interpolated average precision for one class. Detections are
// sorted by descending confidence (ties to the lower input index, frames in
// input order); each gt matches at most one detection at IoU >= threshold.
// The class must exist in the ground truth.
double average_precision(const std::vector<FrameDetections>& dets,
                         const std::vector<Annotation>& gts,
                         const std::vector<std::string>& vocabulary,
                         const std::string& class_label, double iou_threshold = 0.5);

// Mean AP over classes present in the ground truth; also fills recall at the
// IoU threshold over all gt objects (class-aware, using all given detections).
EvalReport mean_average_precision(const std::vector<FrameDetections>& dets,
                                  const std::vector<Annotation>& gts,
                                  double iou_threshold = 0.5);

// Fraction of gt objects covered by a same-class detection at IoU >= iou_thr.
// Each detection may cover one gt (greedy by descending confidence).
double recall_at_iou(const std::vector<FrameDetections>& dets,
                     const std::vector<Annotation>& gts, double iou_thr);

struct PipelineComparison {
  EvalReport baseline;
  EvalReport cascade;
  double delta_recall = 0;
  double delta_map = 0;
  std::vector<std::string> per_image_csv_rows;  // image,baseline_recall,cascade_recall
};

// Runs detect (baseline) and detect_cascade (enhanced) on identical frames and
// reports both plus deltas. Frames must align 1:1 with annotations.
PipelineComparison compare_pipelines(DetectorModel& model, ConditionalGenerator<float>& g,
                                     const std::vector<ImageTensor>& frames,
                                     const std::vector<Annotation>& annotations,
                                     const EnhanceSpec& spec,
                                     const DetectThresholds& thr = {});

}  // namespace wildgan
