#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wildgan/image.hpp"
#include "wildgan/losses.hpp"
#include "wildgan/models.hpp"

namespace wildgan {

enum class GanMode { latent, conditional };

struct GanTrainConfig {
  GanMode mode = GanMode::latent;
  int batch_size = 72;
  int epochs = 25;
  int image_size = 32;   // training image side (latent) / input side (conditional)
  int noise_dim = 100;
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  uint64_t seed = 0;
  GenLossVariant gen_variant = GenLossVariant::non_saturating;
  double lambda_rec = 1.0;   // conditional reconstruction weight
  double lambda_adv = 0.01;  // conditional adversarial weight
  NoiseDistribution noise_dist = NoiseDistribution::uniform;
  nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
  int base_channels = 64;
  int cond_hidden_channels = 32;
  int cond_hidden_layers = 2;
};

struct GanBatchRecord {
  int epoch = 0;
  int batch = 0;
  double d_loss = 0;
  double g_loss = 0;
  double v_estimate = 0;
  double d_real_mean = 0;
};

// Exactly one of the generators is set, depending on the training mode.
struct GanModels {
  std::unique_ptr<LatentGenerator<float>> latent_g;
  std::unique_ptr<ConditionalGenerator<float>> cond_g;
  std::unique_ptr<Discriminator<float>> d;
};

using GanEpochSink = std::function<void(int epoch, GanModels& models)>;

// Alternating training: per batch one discriminator update, then one
// generator update. Deterministic for a given config+seed. paired_targets is
// required in conditional mode (aligned 1:1 with dataset) and must be square.
// Throws NumericError naming epoch/batch if any loss goes non-finite.
GanModels train_gan(const GanTrainConfig& cfg, const std::vector<ImageTensor>& dataset,
                    const std::vector<ImageTensor>* paired_targets = nullptr,
                    std::vector<GanBatchRecord>* log = nullptr,
                    const GanEpochSink& sink = nullptr);

// CSV with columns epoch,batch,d_loss,g_loss,v_estimate.
void write_loss_csv(const std::string& path, const std::vector<GanBatchRecord>& log);

}  // namespace wildgan
