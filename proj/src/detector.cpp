#include "wildgan/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wildgan/batching.hpp"
#include "wildgan/checkpoint_io.hpp"
#include "wildgan/error.hpp"
#include "wildgan/resample.hpp"
#include "wildgan/ssd_loss.hpp"

namespace wildgan {

namespace {

Tensor<float> to_net_input(const ImageTensor& image, int input_size) {
  Tensor<float> x = pack_nchw_one(image);
  if (image.height != input_size || image.width != input_size)
    x = resize_bilinear_nchw(x, input_size, input_size);
  return x;
}

}  // namespace

std::vector<Detection> detect(DetectorModel& model, const ImageTensor& image,
                              const DetectThresholds& thr) {
  validate_image(image, "detect input");
  DetectorNet<float>& net = *model.net;
  Tensor<float> x = to_net_input(image, net.config().input_size);
  DetectorOutput<float> out = net.forward(x, /*train=*/false);

  const AnchorSet& anchors = net.anchors();
  const int cc = net.config().num_classes + 1;
  std::vector<Detection> raw;
  std::vector<double> zrow(static_cast<size_t>(cc)), prob;
  for (size_t ai = 0; ai < anchors.size(); ++ai) {
    for (int j = 0; j < cc; ++j)
      zrow[static_cast<size_t>(j)] =
          out.conf.data[ai * static_cast<size_t>(cc) + static_cast<size_t>(j)];
    detail::softmax_row(zrow.data(), cc, prob);
    std::array<double, 4> offsets{};
    for (int j = 0; j < 4; ++j)
      offsets[static_cast<size_t>(j)] = out.loc.data[ai * 4 + static_cast<size_t>(j)];
    for (int c = 1; c < cc; ++c) {
      const double p = prob[static_cast<size_t>(c)];
      if (p < thr.confidence) continue;
      BoundingBox b = decode_box(offsets, anchors.boxes[ai]);
      if (b.xmax <= b.xmin || b.ymax <= b.ymin) continue;  // collapsed by clipping
      raw.push_back({b, c - 1, p});
    }
  }
  return nms(raw, thr.nms_iou, thr.top_k);
}

std::vector<Detection> detect_cascade(ConditionalGenerator<float>& g,
                                      DetectorModel& model, const ImageTensor& frame,
                                      const EnhanceSpec& spec,
                                      const DetectThresholds& thr) {
  ImageTensor enhanced = enhance_frame(g, frame, spec);
  return detect(model, enhanced, thr);
}

std::vector<BoundingBox> normalized_gt_boxes(const Annotation& ann) {
  std::vector<BoundingBox> out;
  out.reserve(ann.objects.size());
  for (const auto& o : ann.objects)
    out.push_back({o.bbox.xmin / ann.width, o.bbox.ymin / ann.height,
                   o.bbox.xmax / ann.width, o.bbox.ymax / ann.height});
  return out;
}

std::vector<int> gt_class_ids(const Annotation& ann,
                              const std::vector<std::string>& vocabulary) {
  std::vector<int> out;
  out.reserve(ann.objects.size());
  for (const auto& o : ann.objects) {
    const auto it = std::find(vocabulary.begin(), vocabulary.end(), o.class_label);
    if (it == vocabulary.end())
      throw ValidationError("unknown class label '" + o.class_label + "'");
    out.push_back(static_cast<int>(it - vocabulary.begin()));
  }
  return out;
}

DetectorModel train_detector(const DetectorTrainConfig& cfg,
                             const std::vector<AnnotatedImage>& dataset,
                             const std::string& init_checkpoint,
                             ConditionalGenerator<float>* enhancer,
                             std::vector<DetectorBatchRecord>* log,
                             const DetectorEpochSink& sink) {
  if (dataset.empty()) throw ValidationError("train_detector: empty dataset");
  if (cfg.epochs < 1) throw ValidationError("train_detector: epochs must be >= 1");
  if (cfg.batch_size < 1) throw ValidationError("train_detector: batch_size must be >= 1");

  std::vector<Annotation> anns;
  anns.reserve(dataset.size());
  for (const auto& d : dataset) anns.push_back(d.annotation);
  DetectorModel model;
  model.vocabulary = class_vocabulary(anns);
  if (model.vocabulary.empty())
    throw ValidationError("train_detector: dataset has no annotated objects");

  DetectorConfig arch = cfg.arch;
  arch.num_classes = static_cast<int>(model.vocabulary.size());
  Rng init_rng(mix_seed(cfg.seed, 3));
  model.net = std::make_unique<DetectorNet<float>>(arch, init_rng);

  if (!init_checkpoint.empty()) {
    const CheckpointData data = load_checkpoint(init_checkpoint);
    int copied = 0;
    for (auto& p : model.net->params()) {
      auto it = data.tensors.find(p.name);
      if (it != data.tensors.end() && it->second.shape == p.param->value.shape) {
        p.param->value.data = it->second.data;
        ++copied;
      }
    }
    for (auto& b : model.net->buffers()) {
      auto it = data.tensors.find(b.name);
      if (it != data.tensors.end() && it->second.shape == b.tensor->shape)
        b.tensor->data = it->second.data;
    }
    if (copied == 0)
      throw ShapeError("train_detector: init checkpoint shares no tensors with model");
  }

  // precompute matches and inputs once; they do not change across epochs
  const int input_size = arch.input_size;
  const AnchorSet& anchors = model.net->anchors();
  std::vector<Tensor<float>> inputs;
  std::vector<MatchResult> matches;
  std::vector<std::vector<int>> classes;
  inputs.reserve(dataset.size());
  for (const auto& item : dataset) {
    if (enhancer) {
      EnhanceSpec spec;
      spec.target_width = std::max(input_size, item.image.width);
      spec.target_height = std::max(input_size, item.image.height);
      ImageTensor enhanced = enhance_frame(*enhancer, item.image, spec);
      inputs.push_back(to_net_input(enhanced, input_size));
    } else {
      inputs.push_back(to_net_input(item.image, input_size));
    }
    matches.push_back(
        match_anchors(normalized_gt_boxes(item.annotation), anchors, cfg.match_iou));
    classes.push_back(gt_class_ids(item.annotation, model.vocabulary));
  }

  nn::Optimizer<float> opt(model.net->params(), nn::OptimizerKind::adam,
                           cfg.learning_rate, cfg.beta1, cfg.beta2);
  const int n = static_cast<int>(dataset.size());
  const int a_total = static_cast<int>(anchors.size());
  const int cc = arch.num_classes + 1;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = epoch_batches(n, cfg.batch_size, cfg.seed, true, epoch);
    for (size_t b = 0; b < batches.size(); ++b) {
      const auto& idx = batches[b];
      const int bs = static_cast<int>(idx.size());
      Tensor<float> batch({bs, 3, input_size, input_size});
      for (int i = 0; i < bs; ++i)
        std::copy(inputs[static_cast<size_t>(idx[i])].data.begin(),
                  inputs[static_cast<size_t>(idx[i])].data.end(),
                  batch.data.begin() + static_cast<size_t>(i) * 3 * input_size * input_size);

      opt.zero_grad();
      DetectorOutput<float> out = model.net->forward(batch, /*train=*/true);
      Tensor<float> dloc({bs, a_total, 4});
      Tensor<float> dconf({bs, a_total, cc});
      double batch_loss = 0.0;
      for (int i = 0; i < bs; ++i) {
        Tensor<float> loc_i({a_total, 4});
        Tensor<float> conf_i({a_total, cc});
        std::copy_n(out.loc.data.begin() + static_cast<size_t>(i) * a_total * 4,
                    static_cast<size_t>(a_total) * 4, loc_i.data.begin());
        std::copy_n(out.conf.data.begin() + static_cast<size_t>(i) * a_total * cc,
                    static_cast<size_t>(a_total) * cc, conf_i.data.begin());
        DetectionLossGrads<float> g;
        const size_t di = static_cast<size_t>(idx[i]);
        batch_loss += detection_loss(loc_i, conf_i, matches[di], classes[di],
                                     cfg.neg_pos_ratio, &g) / bs;
        for (size_t k = 0; k < g.dloc.data.size(); ++k)
          dloc.data[static_cast<size_t>(i) * a_total * 4 + k] =
              g.dloc.data[k] / static_cast<float>(bs);
        for (size_t k = 0; k < g.dconf.data.size(); ++k)
          dconf.data[static_cast<size_t>(i) * a_total * cc + k] =
              g.dconf.data[k] / static_cast<float>(bs);
      }
      if (!std::isfinite(batch_loss))
        throw NumericError("train_detector: non-finite loss at epoch " +
                           std::to_string(epoch) + " batch " + std::to_string(b));
      model.net->backward(dloc, dconf);
      opt.step();
      if (log) log->push_back({epoch, static_cast<int>(b), batch_loss});
    }
    if (sink) sink(epoch, model);
  }
  return model;
}

void write_detector_loss_csv(const std::string& path,
                             const std::vector<DetectorBatchRecord>& log) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write loss csv: " + path);
  out << "epoch,batch,loss\n";
  out.precision(10);
  for (const auto& r : log) out << r.epoch << "," << r.batch << "," << r.loss << "\n";
}

}  // namespace wildgan
