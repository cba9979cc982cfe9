#include "wildgan/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "wildgan/batching.hpp"
#include "wildgan/corpus.hpp"
#include "wildgan/error.hpp"
#include "wildgan/gan_train.hpp"
#include "wildgan/metrics.hpp"
#include "wildgan/model_io.hpp"
#include "wildgan/run_config.hpp"
#include "wildgan/video.hpp"

namespace wildgan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shared --config/--seed/--out plumbing. Flags land in the override layer so
// they win over config-file values.
struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<int64_t> seed;

  RunConfig resolve() const {
    RunConfig cfg = RunConfig::load(config_path);
    if (seed) cfg.set_override("seed", *seed);
    if (!out_dir.empty()) cfg.set_override("out", out_dir);
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required = true) {
  cmd->add_option("--config", args.config_path, "JSON config file (flat dotted keys)");
  auto* out = cmd->add_option("--out", args.out_dir, "output directory");
  if (out_required) out->required();
  cmd->add_option("--seed", args.seed, "global seed");
}

std::string prepare_out(RunConfig& cfg) {
  const std::string out = cfg.get_string("out", "");
  if (out.empty()) throw UsageError("--out is required");
  fs::create_directories(out);
  return out;
}

void parse_target(const std::string& s, int& w, int& h) {
  const auto x = s.find('x');
  if (x == std::string::npos)
    throw UsageError("target must be WxH, got '" + s + "'");
  try {
    w = std::stoi(s.substr(0, x));
    h = std::stoi(s.substr(x + 1));
  } catch (const std::exception&) {
    throw UsageError("target must be WxH, got '" + s + "'");
  }
  if (w < 1 || h < 1) throw UsageError("target dimensions must be positive");
}

std::vector<std::string> list_pngs(const std::string& input) {
  std::vector<std::string> files;
  if (fs::is_directory(input)) {
    for (const auto& e : fs::directory_iterator(input))
      if (e.path().extension() == ".png") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no .png files in " + input);
  } else if (fs::exists(input)) {
    files.push_back(input);
  } else {
    throw IoError("input path does not exist: " + input);
  }
  return files;
}

GenLossVariant variant_from_string(const std::string& s) {
  if (s == "saturating") return GenLossVariant::saturating;
  if (s == "non_saturating") return GenLossVariant::non_saturating;
  throw UsageError("loss variant must be saturating|non_saturating");
}

// ---- subcommand bodies -------------------------------------------------

struct GanFlags {
  CommonArgs common;
  std::string data;
  std::optional<std::string> mode;
  std::optional<int64_t> epochs, batch_size, image_size, noise_dim, base_channels;
  std::optional<int64_t> cond_hidden, cond_layers;
  std::optional<double> lr, beta1, beta2, lambda_rec, lambda_adv;
  std::optional<std::string> loss_variant, noise_dist;
};

int cmd_train_gan(const GanFlags& f) {
  RunConfig cfg = f.common.resolve();
  if (f.mode) cfg.set_override("mode", *f.mode);
  if (f.epochs) cfg.set_override("epochs", *f.epochs);
  if (f.batch_size) cfg.set_override("batch_size", *f.batch_size);
  if (f.image_size) cfg.set_override("image_size", *f.image_size);
  if (f.noise_dim) cfg.set_override("noise_dim", *f.noise_dim);
  if (f.base_channels) cfg.set_override("base_channels", *f.base_channels);
  if (f.cond_hidden) cfg.set_override("cond.hidden_channels", *f.cond_hidden);
  if (f.cond_layers) cfg.set_override("cond.hidden_layers", *f.cond_layers);
  if (f.lr) cfg.set_override("learning_rate", *f.lr);
  if (f.beta1) cfg.set_override("adam.beta1", *f.beta1);
  if (f.beta2) cfg.set_override("adam.beta2", *f.beta2);
  if (f.lambda_rec) cfg.set_override("lambda_rec", *f.lambda_rec);
  if (f.lambda_adv) cfg.set_override("lambda_adv", *f.lambda_adv);
  if (f.loss_variant) cfg.set_override("loss_variant", *f.loss_variant);
  if (f.noise_dist) cfg.set_override("noise_dist", *f.noise_dist);
  cfg.set_override("data", f.data);

  GanTrainConfig tc;
  const std::string mode = cfg.get_string("mode", "latent");
  if (mode != "latent" && mode != "conditional")
    throw UsageError("mode must be latent|conditional");
  tc.mode = mode == "latent" ? GanMode::latent : GanMode::conditional;
  tc.epochs = static_cast<int>(cfg.get_int("epochs", 25));
  tc.batch_size = static_cast<int>(cfg.get_int("batch_size", 72));
  tc.image_size = static_cast<int>(cfg.get_int("image_size", 32));
  tc.noise_dim = static_cast<int>(cfg.get_int("noise_dim", 100));
  tc.base_channels = static_cast<int>(cfg.get_int("base_channels", 64));
  tc.cond_hidden_channels = static_cast<int>(cfg.get_int("cond.hidden_channels", 32));
  tc.cond_hidden_layers = static_cast<int>(cfg.get_int("cond.hidden_layers", 2));
  tc.learning_rate = cfg.get_double("learning_rate", 2e-4);
  tc.beta1 = cfg.get_double("adam.beta1", 0.5);
  tc.beta2 = cfg.get_double("adam.beta2", 0.999);
  tc.lambda_rec = cfg.get_double("lambda_rec", 1.0);
  tc.lambda_adv = cfg.get_double("lambda_adv", 0.01);
  tc.seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
  tc.gen_variant = variant_from_string(cfg.get_string("loss_variant", "non_saturating"));
  tc.noise_dist = noise_distribution_from_string(cfg.get_string("noise_dist", "uniform"));

  const std::string data = cfg.get_string("data", "");
  std::vector<ImageTensor> images;
  std::vector<ImageTensor> targets;
  if (tc.mode == GanMode::latent) {
    images = load_labeled_corpus(data).images;
  } else {
    PairedCorpus pairs = load_paired_corpus(data);
    images = std::move(pairs.degraded);
    targets = std::move(pairs.clean);
    tc.image_size = images.front().width;
  }

  const std::string out = prepare_out(cfg);
  cfg.write_resolved(out + "/resolved_config.json");

  std::vector<GanBatchRecord> log;
  auto sink = [&](int epoch, GanModels& models) {
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%03d", epoch + 1);
    const std::string dir = out + "/checkpoints/" + name;
    if (models.latent_g) save_latent_generator(dir + "/generator", *models.latent_g);
    if (models.cond_g) save_conditional_generator(dir + "/generator", *models.cond_g);
    save_discriminator(dir + "/discriminator", *models.d);
  };
  train_gan(tc, images, targets.empty() ? nullptr : &targets, &log, sink);
  write_loss_csv(out + "/loss.csv", log);
  std::cout << "train-gan: " << tc.epochs << " epochs, " << log.size()
            << " batches logged, checkpoints under " << out << "/checkpoints\n";
  return 0;
}

struct SsdFlags {
  CommonArgs common;
  std::string data;
  std::optional<std::string> init, gan;
  std::optional<int64_t> epochs, batch_size, input_size, base_channels;
  std::optional<double> lr, match_iou;
};

int cmd_train_ssd(const SsdFlags& f) {
  RunConfig cfg = f.common.resolve();
  if (f.init) cfg.set_override("init", *f.init);
  if (f.gan) cfg.set_override("gan", *f.gan);
  if (f.epochs) cfg.set_override("epochs", *f.epochs);
  if (f.batch_size) cfg.set_override("batch_size", *f.batch_size);
  if (f.input_size) cfg.set_override("input_size", *f.input_size);
  if (f.base_channels) cfg.set_override("base_channels", *f.base_channels);
  if (f.lr) cfg.set_override("learning_rate", *f.lr);
  if (f.match_iou) cfg.set_override("match_iou", *f.match_iou);
  cfg.set_override("data", f.data);

  DetectorTrainConfig tc;
  tc.arch.input_size = static_cast<int>(cfg.get_int("input_size", 128));
  tc.epochs = static_cast<int>(cfg.get_int("epochs", 30));
  tc.batch_size = static_cast<int>(cfg.get_int("batch_size", 8));
  tc.learning_rate = cfg.get_double("learning_rate", 1e-3);
  tc.seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
  tc.match_iou = cfg.get_double("match_iou", 0.5);
  const int base = static_cast<int>(cfg.get_int("base_channels", 64));
  tc.arch.base_channels = {base, base * 2, base * 4};
  tc.arch.extra_channels = {base * 4, base * 4};

  AnnotatedCorpus corpus = load_annotated_corpus(cfg.get_string("data", ""));
  std::vector<AnnotatedImage> dataset;
  for (size_t i = 0; i < corpus.images.size(); ++i)
    dataset.push_back({std::move(corpus.images[i]), corpus.annotations[i]});

  std::unique_ptr<ConditionalGenerator<float>> enhancer;
  const std::string gan = cfg.get_string("gan", "");
  if (!gan.empty()) enhancer = load_conditional_generator(gan);

  const std::string out = prepare_out(cfg);
  cfg.write_resolved(out + "/resolved_config.json");

  std::vector<DetectorBatchRecord> log;
  auto sink = [&](int epoch, DetectorModel& model) {
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%03d", epoch + 1);
    save_detector(out + "/checkpoints/" + name + "/detector", model);
  };
  train_detector(tc, dataset, cfg.get_string("init", ""), enhancer.get(), &log, sink);
  write_detector_loss_csv(out + "/loss.csv", log);
  std::cout << "train-ssd: " << tc.epochs << " epochs, final loss "
            << (log.empty() ? 0.0 : log.back().loss) << "\n";
  return 0;
}

struct EnhanceFlags {
  CommonArgs common;
  std::string checkpoint, input, target;
  std::optional<int64_t> tile;
};

int cmd_enhance(const EnhanceFlags& f) {
  RunConfig cfg = f.common.resolve();
  cfg.set_override("checkpoint", f.checkpoint);
  cfg.set_override("input", f.input);
  cfg.set_override("target", f.target);
  if (f.tile) cfg.set_override("tile", *f.tile);

  EnhanceSpec spec;
  parse_target(cfg.get_string("target", ""), spec.target_width, spec.target_height);
  spec.tile_size = static_cast<int>(cfg.get_int("tile", 0));
  spec.checkpoint_ref = cfg.get_string("checkpoint", "");
  auto g = load_conditional_generator(spec.checkpoint_ref);

  const std::string out = prepare_out(cfg);
  cfg.write_resolved(out + "/resolved_config.json");

  for (const auto& path : list_pngs(cfg.get_string("input", ""))) {
    ImageTensor frame = load_png(path);
    ImageTensor enhanced = enhance_frame(*g, frame, spec);
    const std::string stem = fs::path(path).stem().string();
    const std::string name = stem + "_enh_" + std::to_string(spec.target_width) + "x" +
                             std::to_string(spec.target_height) + ".png";
    save_png(out + "/" + name, enhanced);
    std::cout << name << "\n";
  }
  return 0;
}

struct DetectFlags {
  CommonArgs common;
  std::string detector, input;
  bool cascade = false;
  bool render = false;
  std::optional<std::string> gan, target;
  std::optional<int64_t> stride, top_k, tile;
  std::optional<double> conf, nms_iou;
};

void render_detections(ImageTensor img, const std::vector<Detection>& dets,
                       const std::vector<std::string>& vocab, const std::string& path) {
  static const float palette[4][3] = {
      {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}, {1, 1, -1}};
  for (const auto& d : dets) {
    const float* col = palette[d.class_id % 4];
    const int x0 = std::clamp(static_cast<int>(d.box.xmin * img.width), 0, img.width - 1);
    const int x1 = std::clamp(static_cast<int>(d.box.xmax * img.width), 0, img.width - 1);
    const int y0 = std::clamp(static_cast<int>(d.box.ymin * img.height), 0, img.height - 1);
    const int y1 = std::clamp(static_cast<int>(d.box.ymax * img.height), 0, img.height - 1);
    for (int x = x0; x <= x1; ++x)
      for (int c = 0; c < img.channels; ++c) {
        img.at(y0, x, c) = col[c];
        img.at(y1, x, c) = col[c];
      }
    for (int y = y0; y <= y1; ++y)
      for (int c = 0; c < img.channels; ++c) {
        img.at(y, x0, c) = col[c];
        img.at(y, x1, c) = col[c];
      }
  }
  (void)vocab;
  save_png(path, img);
}

int cmd_detect(const DetectFlags& f) {
  RunConfig cfg = f.common.resolve();
  cfg.set_override("detector", f.detector);
  cfg.set_override("input", f.input);
  cfg.set_override("cascade", f.cascade);
  cfg.set_override("render", f.render);
  if (f.gan) cfg.set_override("gan", *f.gan);
  if (f.target) cfg.set_override("target", *f.target);
  if (f.stride) cfg.set_override("video_stride", *f.stride);
  if (f.top_k) cfg.set_override("top_k", *f.top_k);
  if (f.tile) cfg.set_override("tile", *f.tile);
  if (f.conf) cfg.set_override("confidence", *f.conf);
  if (f.nms_iou) cfg.set_override("nms_iou", *f.nms_iou);

  DetectorModel model = load_detector(cfg.get_string("detector", ""));
  DetectThresholds thr;
  thr.confidence = cfg.get_double("confidence", 0.5);
  thr.nms_iou = cfg.get_double("nms_iou", 0.45);
  thr.top_k = static_cast<int>(cfg.get_int("top_k", 200));

  const bool cascade = cfg.get_bool("cascade", false);
  std::unique_ptr<ConditionalGenerator<float>> g;
  EnhanceSpec spec;
  spec.tile_size = static_cast<int>(cfg.get_int("tile", 0));
  std::string target = cfg.get_string("target", "");
  if (cascade) {
    const std::string gan = cfg.get_string("gan", "");
    if (gan.empty())
      throw UsageError("--cascade requires --gan <conditional generator checkpoint>");
    g = load_conditional_generator(gan);
    spec.checkpoint_ref = gan;
  }

  // frames: a png, a directory of pngs, or a video
  const std::string input = cfg.get_string("input", "");
  std::vector<std::pair<std::string, ImageTensor>> frames;
  const std::string ext = fs::path(input).extension().string();
  if (!fs::is_directory(input) && !ext.empty() && ext != ".png") {
    const int stride = static_cast<int>(cfg.get_int("video_stride", 1));
    auto extracted = extract_frames(input, stride);
    for (size_t i = 0; i < extracted.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06d", static_cast<int>(i) * stride);
      frames.emplace_back(name, std::move(extracted[i]));
    }
  } else {
    for (const auto& path : list_pngs(input))
      frames.emplace_back(fs::path(path).stem().string(), load_png(path));
  }

  const std::string out = prepare_out(cfg);
  cfg.write_resolved(out + "/resolved_config.json");
  if (cfg.get_bool("render", false)) fs::create_directories(out + "/rendered");

  std::ofstream jsonl(out + "/detections.jsonl");
  if (!jsonl) throw IoError("cannot write detections.jsonl");
  for (auto& [id, frame] : frames) {
    std::vector<Detection> dets;
    if (cascade) {
      EnhanceSpec s = spec;
      if (target.empty()) {
        s.target_width = frame.width;
        s.target_height = frame.height;
      } else {
        parse_target(target, s.target_width, s.target_height);
      }
      dets = detect_cascade(*g, model, frame, s, thr);
    } else {
      dets = detect(model, frame, thr);
    }
    json dj = json::array();
    for (const auto& d : dets)
      dj.push_back({{"class", model.vocabulary[static_cast<size_t>(d.class_id)]},
                    {"confidence", d.confidence},
                    {"bbox_norm", {d.box.xmin, d.box.ymin, d.box.xmax, d.box.ymax}}});
    jsonl << json{{"frame", id}, {"detections", dj}}.dump() << "\n";
    if (cfg.get_bool("render", false))
      render_detections(frame, dets, model.vocabulary,
                        out + "/rendered/" + id + ".png");
  }
  std::cout << "detect: " << frames.size() << " frames -> " << out
            << "/detections.jsonl\n";
  return 0;
}

struct ProbeFlags {
  CommonArgs common;
  std::string discriminator, data;
  std::optional<double> l2;
};

int cmd_probe(const ProbeFlags& f) {
  RunConfig cfg = f.common.resolve();
  cfg.set_override("discriminator", f.discriminator);
  cfg.set_override("data", f.data);
  if (f.l2) cfg.set_override("l2", *f.l2);

  auto d = load_discriminator(cfg.get_string("discriminator", ""));
  LabeledCorpus corpus = load_labeled_corpus(cfg.get_string("data", ""));
  const double l2 = cfg.get_double("l2", 1e-4);
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 0));

  for (const auto& img : corpus.images)
    if (img.height != d->image_size() || img.width != d->image_size())
      throw ValidationError("probe: corpus images must be " +
                            std::to_string(d->image_size()) + "x" +
                            std::to_string(d->image_size()));

  std::vector<ProbeVector> feats;
  feats.reserve(corpus.images.size());
  for (const auto& img : corpus.images) feats.push_back(extract_features(*d, img));
  std::cout << "probe feature dim: " << (feats.empty() ? 0 : feats[0].values.size())
            << "\n";

  // 80/20 split by seeded shuffle
  std::vector<int> order(static_cast<int>(feats.size()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(mix_seed(seed, 80));
  rng.shuffle(order);
  const size_t n_train = order.size() * 8 / 10;
  std::vector<ProbeVector> train_f, test_f;
  std::vector<int> train_y, test_y;
  for (size_t i = 0; i < order.size(); ++i) {
    const int idx = order[i];
    if (i < n_train) {
      train_f.push_back(feats[static_cast<size_t>(idx)]);
      train_y.push_back(corpus.labels[static_cast<size_t>(idx)]);
    } else {
      test_f.push_back(feats[static_cast<size_t>(idx)]);
      test_y.push_back(corpus.labels[static_cast<size_t>(idx)]);
    }
  }

  LinearProbe probe = train_linear_probe(train_f, train_y, l2, seed);

  const std::string out = prepare_out(cfg);
  cfg.write_resolved(out + "/resolved_config.json");
  save_probe(out + "/probe", probe);

  std::ofstream csv(out + "/probe_report.csv");
  csv << "split,accuracy,class,precision,recall\n";
  auto report_split = [&](const char* split, const std::vector<ProbeVector>& fs_,
                          const std::vector<int>& ys) {
    const int classes = static_cast<int>(corpus.class_names.size());
    std::vector<int> tp(classes, 0), fp(classes, 0), fn(classes, 0);
    int correct = 0;
    for (size_t i = 0; i < fs_.size(); ++i) {
      const int pred = probe_predict(probe, fs_[i]).class_id;
      if (pred == ys[i]) {
        ++correct;
        ++tp[ys[i]];
      } else {
        ++fp[pred];
        ++fn[ys[i]];
      }
    }
    const double acc = fs_.empty() ? 0.0 : static_cast<double>(correct) / fs_.size();
    for (int c = 0; c < classes; ++c) {
      const double prec = tp[c] + fp[c] ? static_cast<double>(tp[c]) / (tp[c] + fp[c]) : 0;
      const double rec = tp[c] + fn[c] ? static_cast<double>(tp[c]) / (tp[c] + fn[c]) : 0;
      csv << split << "," << acc << "," << corpus.class_names[static_cast<size_t>(c)]
          << "," << prec << "," << rec << "\n";
    }
    return acc;
  };
  const double train_acc = report_split("train", train_f, train_y);
  const double test_acc = report_split("test", test_f, test_y);
  std::cout << "probe accuracy: train " << train_acc << ", test " << test_acc << "\n";
  return 0;
}

struct EvalFlags {
  CommonArgs common;
  std::string detector, data;
  std::optional<double> conf, iou;
};

int cmd_eval(const EvalFlags& f) {
  RunConfig cfg = f.common.resolve();
  cfg.set_override("detector", f.detector);
  cfg.set_override("data", f.data);
  if (f.conf) cfg.set_override("confidence", *f.conf);
  if (f.iou) cfg.set_override("iou", *f.iou);

  DetectorModel model = load_detector(cfg.get_string("detector", ""));
  AnnotatedCorpus corpus = load_annotated_corpus(cfg.get_string("data", ""));
  DetectThresholds thr;
  thr.confidence = cfg.get_double("confidence", 0.5);
  thr.match_iou = cfg.get_double("iou", 0.5);

  std::vector<FrameDetections> dets;
  for (size_t i = 0; i < corpus.images.size(); ++i)
    dets.push_back({corpus.annotations[i].image_id, detect(model, corpus.images[i], thr)});
  EvalReport report = mean_average_precision(dets, corpus.annotations, thr.match_iou);
  report.fingerprint = {{"seed", cfg.get_int("seed", 0)},
                        {"confidence", thr.confidence},
                        {"iou", thr.match_iou}};

  const std::string out = prepare_out(cfg);
  cfg.write_resolved(out + "/resolved_config.json");
  std::ofstream jf(out + "/eval.json");
  jf << eval_report_to_json(report).dump(2) << "\n";
  std::cout << "eval: mAP " << report.map_score << ", recall@" << thr.match_iou << " "
            << report.recall_at_iou << "\n";
  return 0;
}

struct CompareFlags {
  CommonArgs common;
  std::string detector, gan, data;
  std::optional<std::string> target;
  std::optional<int64_t> tile;
  std::optional<double> conf, iou;
};

int cmd_compare(const CompareFlags& f) {
  RunConfig cfg = f.common.resolve();
  cfg.set_override("detector", f.detector);
  cfg.set_override("gan", f.gan);
  cfg.set_override("data", f.data);
  if (f.target) cfg.set_override("target", *f.target);
  if (f.tile) cfg.set_override("tile", *f.tile);
  if (f.conf) cfg.set_override("confidence", *f.conf);
  if (f.iou) cfg.set_override("iou", *f.iou);

  DetectorModel model = load_detector(cfg.get_string("detector", ""));
  auto g = load_conditional_generator(cfg.get_string("gan", ""));
  AnnotatedCorpus corpus = load_annotated_corpus(cfg.get_string("data", ""));

  DetectThresholds thr;
  thr.confidence = cfg.get_double("confidence", 0.5);
  thr.match_iou = cfg.get_double("iou", 0.5);

  EnhanceSpec spec;
  spec.tile_size = static_cast<int>(cfg.get_int("tile", 0));
  const std::string target = cfg.get_string("target", "");
  if (target.empty()) {
    spec.target_width = g->out_w();
    spec.target_height = g->out_h();
  } else {
    parse_target(target, spec.target_width, spec.target_height);
  }

  PipelineComparison cmp =
      compare_pipelines(model, *g, corpus.images, corpus.annotations, spec, thr);

  const std::string out = prepare_out(cfg);
  cfg.write_resolved(out + "/resolved_config.json");
  json j{{"baseline", eval_report_to_json(cmp.baseline)},
         {"cascade", eval_report_to_json(cmp.cascade)},
         {"delta_recall", cmp.delta_recall},
         {"delta_map", cmp.delta_map}};
  std::ofstream jf(out + "/compare.json");
  jf << j.dump(2) << "\n";
  std::ofstream csv(out + "/per_image_recall.csv");
  for (const auto& row : cmp.per_image_csv_rows) csv << row << "\n";

  std::cout << "baseline recall " << cmp.baseline.recall_at_iou << ", cascade recall "
            << cmp.cascade.recall_at_iou << ", delta " << cmp.delta_recall << "\n";
  std::cout << "baseline mAP " << cmp.baseline.map_score << ", cascade mAP "
            << cmp.cascade.map_score << ", delta " << cmp.delta_map << "\n";
  return 0;
}

struct CorpusFlags {
  CommonArgs common;
  std::string kind;
  std::optional<int64_t> count, size;
};

int cmd_make_corpus(const CorpusFlags& f) {
  RunConfig cfg = f.common.resolve();
  cfg.set_override("kind", f.kind);
  if (f.count) cfg.set_override("count", *f.count);
  if (f.size) cfg.set_override("size", *f.size);

  CorpusOptions opts;
  opts.kind = cfg.get_string("kind", "gan32");
  opts.seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
  opts.count = static_cast<int>(cfg.get_int("count", 0));
  opts.size = static_cast<int>(cfg.get_int("size", 0));
  const std::string out = prepare_out(cfg);
  make_corpus(out, opts);
  cfg.write_resolved(out + "/resolved_config.json");
  std::cout << "make-corpus: wrote " << opts.kind << " corpus to " << out << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"GAN-enhanced object detection for degraded imagery"};
  app.require_subcommand(1);

  CorpusFlags corpus_f;
  auto* mc = app.add_subcommand("make-corpus", "generate a bundled synthetic dataset");
  mc->add_option("--kind", corpus_f.kind, "gan32|pairs|scenes|benchmark")->required();
  mc->add_option("--count", corpus_f.count, "number of images");
  mc->add_option("--size", corpus_f.size, "image side in pixels");
  add_common(mc, corpus_f.common);

  GanFlags gan_f;
  auto* tg = app.add_subcommand("train-gan", "train the DCGAN (latent or conditional)");
  tg->add_option("--data", gan_f.data, "corpus dir (gan32 layout, or pairs layout)")
      ->required();
  tg->add_option("--mode", gan_f.mode, "latent|conditional");
  tg->add_option("--epochs", gan_f.epochs);
  tg->add_option("--batch-size", gan_f.batch_size);
  tg->add_option("--image-size", gan_f.image_size);
  tg->add_option("--noise-dim", gan_f.noise_dim);
  tg->add_option("--base-channels", gan_f.base_channels);
  tg->add_option("--cond-hidden", gan_f.cond_hidden);
  tg->add_option("--cond-layers", gan_f.cond_layers);
  tg->add_option("--lr", gan_f.lr);
  tg->add_option("--beta1", gan_f.beta1);
  tg->add_option("--beta2", gan_f.beta2);
  tg->add_option("--lambda-rec", gan_f.lambda_rec);
  tg->add_option("--lambda-adv", gan_f.lambda_adv);
  tg->add_option("--loss-variant", gan_f.loss_variant, "saturating|non_saturating");
  tg->add_option("--noise-dist", gan_f.noise_dist, "uniform|gaussian");
  add_common(tg, gan_f.common);

  SsdFlags ssd_f;
  auto* ts = app.add_subcommand("train-ssd", "train the single-shot detector");
  ts->add_option("--data", ssd_f.data, "scenes corpus dir (annotations.jsonl)")
      ->required();
  ts->add_option("--init", ssd_f.init, "detector checkpoint to warm-start from");
  ts->add_option("--gan", ssd_f.gan, "conditional generator for on-the-fly enhancement");
  ts->add_option("--epochs", ssd_f.epochs);
  ts->add_option("--batch-size", ssd_f.batch_size);
  ts->add_option("--input-size", ssd_f.input_size);
  ts->add_option("--base-channels", ssd_f.base_channels);
  ts->add_option("--lr", ssd_f.lr);
  ts->add_option("--match-iou", ssd_f.match_iou);
  add_common(ts, ssd_f.common);

  EnhanceFlags enh_f;
  auto* en = app.add_subcommand("enhance", "upscale/restore frames with a trained GAN");
  en->add_option("--checkpoint", enh_f.checkpoint, "conditional generator checkpoint")
      ->required();
  en->add_option("--input", enh_f.input, "png file or directory")->required();
  en->add_option("--target", enh_f.target, "WxH output resolution")->required();
  en->add_option("--tile", enh_f.tile, "tile size for large frames (0 = whole frame)");
  add_common(en, enh_f.common);

  DetectFlags det_f;
  auto* de = app.add_subcommand("detect", "run the detector (optionally as a cascade)");
  de->add_option("--detector", det_f.detector, "detector checkpoint")->required();
  de->add_option("--input", det_f.input, "png, directory of pngs, or video")->required();
  de->add_flag("--cascade", det_f.cascade, "enhance with the GAN before detecting");
  de->add_option("--gan", det_f.gan, "conditional generator checkpoint");
  de->add_option("--target", det_f.target, "WxH enhancement target (cascade)");
  de->add_option("--tile", det_f.tile);
  de->add_option("--video-stride", det_f.stride);
  de->add_option("--conf", det_f.conf, "confidence threshold");
  de->add_option("--nms-iou", det_f.nms_iou);
  de->add_option("--top-k", det_f.top_k);
  de->add_flag("--render", det_f.render, "write annotated pngs");
  add_common(de, det_f.common);

  ProbeFlags probe_f;
  auto* pr = app.add_subcommand("probe", "linear probe on discriminator features");
  pr->add_option("--discriminator", probe_f.discriminator)->required();
  pr->add_option("--data", probe_f.data, "labeled 32x32 corpus (gan32 layout)")
      ->required();
  pr->add_option("--l2", probe_f.l2, "L2 regularization strength");
  add_common(pr, probe_f.common);

  EvalFlags eval_f;
  auto* ev = app.add_subcommand("eval", "mAP/recall of a detector on an annotated set");
  ev->add_option("--detector", eval_f.detector)->required();
  ev->add_option("--data", eval_f.data, "annotated corpus dir")->required();
  ev->add_option("--conf", eval_f.conf);
  ev->add_option("--iou", eval_f.iou);
  add_common(ev, eval_f.common);

  CompareFlags cmp_f;
  auto* cp = app.add_subcommand("compare", "baseline SSD vs DCGAN+SSD cascade");
  cp->add_option("--detector", cmp_f.detector)->required();
  cp->add_option("--gan", cmp_f.gan)->required();
  cp->add_option("--data", cmp_f.data, "benchmark corpus dir")->required();
  cp->add_option("--target", cmp_f.target, "WxH enhancement target");
  cp->add_option("--tile", cmp_f.tile);
  cp->add_option("--conf", cmp_f.conf);
  cp->add_option("--iou", cmp_f.iou);
  add_common(cp, cmp_f.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (mc->parsed()) return cmd_make_corpus(corpus_f);
  if (tg->parsed()) return cmd_train_gan(gan_f);
  if (ts->parsed()) return cmd_train_ssd(ssd_f);
  if (en->parsed()) return cmd_enhance(enh_f);
  if (de->parsed()) return cmd_detect(det_f);
  if (pr->parsed()) return cmd_probe(probe_f);
  if (ev->parsed()) return cmd_eval(eval_f);
  if (cp->parsed()) return cmd_compare(cmp_f);
  throw UsageError("no subcommand given");
}

}  // namespace wildgan
