#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wildgan/annotations.hpp"
#include "wildgan/detector_net.hpp"
#include "wildgan/enhancer.hpp"
#include "wildgan/image.hpp"
#include "wildgan/matching.hpp"
#include "wildgan/nms.hpp"

namespace wildgan {

// Detector with its class vocabulary. Detection::class_id indexes vocabulary
// (foreground only; score column 0 is background).
struct DetectorModel {
  std::unique_ptr<DetectorNet<float>> net;
  std::vector<std::string> vocabulary;
};

struct DetectThresholds {
  double confidence = 0.5;
  double nms_iou = 0.45;
  int top_k = 200;
  double match_iou = 0.5;  // training-side anchor matching
};

// Forward -> decode -> drop background/below-threshold -> per-class NMS.
// Inputs of any size are bilinearly resized to the detector input; boxes stay
// in normalized coordinates.
std::vector<Detection> detect(DetectorModel& model, const ImageTensor& image,
                              const DetectThresholds& thr = {});

// Enhance-then-detect. Coordinates are normalized, so detections refer to the
// original frame unchanged.
std::vector<Detection> detect_cascade(ConditionalGenerator<float>& g,
                                      DetectorModel& model, const ImageTensor& frame,
                                      const EnhanceSpec& spec,
                                      const DetectThresholds& thr = {});

struct DetectorTrainConfig {
  DetectorConfig arch;  // num_classes filled from the data vocabulary
  int epochs = 30;
  int batch_size = 8;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  uint64_t seed = 0;
  int neg_pos_ratio = 3;
  double match_iou = 0.5;
};

struct DetectorBatchRecord {
  int epoch = 0;
  int batch = 0;
  double loss = 0;
};

struct AnnotatedImage {
  ImageTensor image;
  Annotation annotation;
};

using DetectorEpochSink = std::function<void(int epoch, DetectorModel& model)>;

// Minimizes the single-shot loss (batch mean of per-image losses).
// init, when given, warm-starts from a detector checkpoint: tensors with
// matching name and shape are copied ("pretrained" base network).
// enhancer, when given, runs every training frame through enhance_frame at the
// detector input size first.
DetectorModel train_detector(const DetectorTrainConfig& cfg,
                             const std::vector<AnnotatedImage>& dataset,
                             const std::string& init_checkpoint = "",
                             ConditionalGenerator<float>* enhancer = nullptr,
                             std::vector<DetectorBatchRecord>* log = nullptr,
                             const DetectorEpochSink& sink = nullptr);

// Normalized gt boxes + vocabulary class indices for one annotation.
std::vector<BoundingBox> normalized_gt_boxes(const Annotation& ann);
std::vector<int> gt_class_ids(const Annotation& ann,
                              const std::vector<std::string>& vocabulary);

void write_detector_loss_csv(const std::string& path,
                             const std::vector<DetectorBatchRecord>& log);

}  // namespace wildgan
