#pragma once

#include <memory>
#include <string>

#include "wildgan/checkpoint_io.hpp"
#include "wildgan/detector.hpp"
#include "wildgan/models.hpp"
#include "wildgan/probe.hpp"

namespace wildgan {

// Kind-checked checkpoint save/load for each model family. Rebuilds the
// architecture from the manifest, then fills tensors (shape mismatches throw
// ShapeError).

inline void save_latent_generator(const std::string& dir, LatentGenerator<float>& g) {
  save_checkpoint(dir, snapshot_model(g, "generator_latent"));
}

inline void save_conditional_generator(const std::string& dir,
                                       ConditionalGenerator<float>& g) {
  save_checkpoint(dir, snapshot_model(g, "generator_conditional"));
}

inline void save_discriminator(const std::string& dir, Discriminator<float>& d) {
  save_checkpoint(dir, snapshot_model(d, "discriminator"));
}

inline void save_detector(const std::string& dir, DetectorModel& model) {
  CheckpointData data = snapshot_model(*model.net, "detector");
  data.arch["vocabulary"] = model.vocabulary;
  save_checkpoint(dir, data);
}

inline void check_kind(const CheckpointData& data, const std::string& want,
                       const std::string& dir) {
  if (data.kind != want)
    throw ValidationError("checkpoint " + dir + " holds a '" + data.kind +
                          "' model, expected '" + want + "'");
}

inline std::unique_ptr<LatentGenerator<float>> load_latent_generator(
    const std::string& dir) {
  CheckpointData data = load_checkpoint(dir);
  check_kind(data, "generator_latent", dir);
  Rng rng(0);
  auto g = std::make_unique<LatentGenerator<float>>(
      data.arch.at("noise_dim").get<int>(), data.arch.at("image_size").get<int>(), rng,
      data.arch.value("base_channels", 64));
  restore_model(*g, data);
  return g;
}

inline std::unique_ptr<ConditionalGenerator<float>> load_conditional_generator(
    const std::string& dir) {
  CheckpointData data = load_checkpoint(dir);
  check_kind(data, "generator_conditional", dir);
  Rng rng(0);
  auto g = std::make_unique<ConditionalGenerator<float>>(
      data.arch.at("out_h").get<int>(), data.arch.at("out_w").get<int>(),
      data.arch.at("hidden_channels").get<int>(), data.arch.at("hidden_layers").get<int>(),
      rng);
  restore_model(*g, data);
  return g;
}

inline std::unique_ptr<Discriminator<float>> load_discriminator(const std::string& dir) {
  CheckpointData data = load_checkpoint(dir);
  check_kind(data, "discriminator", dir);
  Rng rng(0);
  auto d = std::make_unique<Discriminator<float>>(
      data.arch.at("image_size").get<int>(), rng, data.arch.value("base_channels", 64));
  restore_model(*d, data);
  return d;
}

inline DetectorModel load_detector(const std::string& dir) {
  CheckpointData data = load_checkpoint(dir);
  check_kind(data, "detector", dir);
  DetectorModel model;
  model.vocabulary = data.arch.at("vocabulary").get<std::vector<std::string>>();
  Rng rng(0);
  model.net = std::make_unique<DetectorNet<float>>(DetectorConfig::from_json(data.arch),
                                                   rng);
  restore_model(*model.net, data);
  return model;
}

// The probe is stored in the same container: weights/bias/standardization as
// f32 tensors, classes and dim in the arch block.
void save_probe(const std::string& dir, const LinearProbe& probe);
LinearProbe load_probe(const std::string& dir);

}  // namespace wildgan
