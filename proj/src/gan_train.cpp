#include "wildgan/gan_train.hpp"

#include <cmath>
#include <fstream>

#include "wildgan/batching.hpp"
#include "wildgan/error.hpp"

namespace wildgan {

namespace {

std::vector<ImageTensor> gather(const std::vector<ImageTensor>& all,
                                const std::vector<int>& idx) {
  std::vector<ImageTensor> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(all[static_cast<size_t>(i)]);
  return out;
}

void guard_finite(double v, const char* what, int epoch, int batch) {
  if (!std::isfinite(v))
    throw NumericError(std::string("train_gan: non-finite ") + what + " at epoch " +
                       std::to_string(epoch) + " batch " + std::to_string(batch));
}

double mean_of(const std::vector<float>& v) {
  double s = 0;
  for (float x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

GanModels train_gan(const GanTrainConfig& cfg, const std::vector<ImageTensor>& dataset,
                    const std::vector<ImageTensor>* paired_targets,
                    std::vector<GanBatchRecord>* log, const GanEpochSink& sink) {
  if (cfg.epochs < 1) throw ValidationError("train_gan: epochs must be >= 1");
  if (cfg.batch_size < 1) throw ValidationError("train_gan: batch_size must be >= 1");
  if (cfg.learning_rate <= 0) throw ValidationError("train_gan: learning_rate must be > 0");
  if (dataset.empty()) throw ValidationError("train_gan: empty dataset");

  const bool conditional = cfg.mode == GanMode::conditional;
  int disc_size = cfg.image_size;
  if (conditional) {
    if (!paired_targets || paired_targets->size() != dataset.size())
      throw ValidationError("train_gan: conditional mode needs paired targets aligned 1:1");
    const ImageTensor& t0 = paired_targets->front();
    if (t0.height != t0.width)
      throw ValidationError("train_gan: conditional targets must be square");
    disc_size = t0.height;
  } else {
    for (const auto& img : dataset)
      if (img.height != cfg.image_size || img.width != cfg.image_size)
        throw ValidationError("train_gan: dataset image size does not match config");
  }

  GanModels models;
  Rng g_init(mix_seed(cfg.seed, 1));
  Rng d_init(mix_seed(cfg.seed, 2));
  if (conditional)
    models.cond_g = std::make_unique<ConditionalGenerator<float>>(
        disc_size, disc_size, cfg.cond_hidden_channels, cfg.cond_hidden_layers, g_init);
  else
    models.latent_g = std::make_unique<LatentGenerator<float>>(
        cfg.noise_dim, cfg.image_size, g_init, cfg.base_channels);
  models.d = std::make_unique<Discriminator<float>>(disc_size, d_init, cfg.base_channels);

  auto g_params = conditional ? models.cond_g->params() : models.latent_g->params();
  nn::Optimizer<float> opt_g(g_params, cfg.optimizer, cfg.learning_rate, cfg.beta1,
                             cfg.beta2);
  nn::Optimizer<float> opt_d(models.d->params(), cfg.optimizer, cfg.learning_rate,
                             cfg.beta1, cfg.beta2);

  Rng noise_rng(mix_seed(cfg.seed, 7));
  const int n = static_cast<int>(dataset.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = epoch_batches(n, cfg.batch_size, cfg.seed, /*shuffle=*/true, epoch);
    for (size_t b = 0; b < batches.size(); ++b) {
      const auto& idx = batches[b];
      const int bs = static_cast<int>(idx.size());
      Tensor<float> real = pack_nchw(gather(conditional ? *paired_targets : dataset, idx));

      auto sample_z = [&](int count) {
        Tensor<float> z({count, cfg.noise_dim});
        for (auto& v : z.data)
          v = static_cast<float>(cfg.noise_dist == NoiseDistribution::uniform
                                     ? noise_rng.uniform()
                                     : noise_rng.gaussian());
        return z;
      };

      Tensor<float> cond_in;
      if (conditional) cond_in = pack_nchw(gather(dataset, idx));

      // --- discriminator update: one step on real + generated batches.
      // The two loss terms are independent, so each pass is backpropped right
      // after its forward (layer caches hold one pass at a time).
      opt_d.zero_grad();
      std::vector<float> d_real = models.d->forward(real, /*train=*/true);
      models.d->backward(discriminator_loss_grad_real(d_real));
      Tensor<float> fake = conditional ? models.cond_g->forward(cond_in, true)
                                       : models.latent_g->forward(sample_z(bs), true);
      std::vector<float> d_fake = models.d->forward(fake, true);
      const double d_loss_now = discriminator_loss(d_real, d_fake);
      guard_finite(d_loss_now, "d_loss", epoch, static_cast<int>(b));
      models.d->backward(discriminator_loss_grad_fake(d_fake));
      opt_d.step();

      GanBatchRecord rec;
      rec.epoch = epoch;
      rec.batch = static_cast<int>(b);
      rec.d_loss = d_loss_now;
      rec.v_estimate = gan_value(d_real, d_fake);
      rec.d_real_mean = mean_of(d_real);

      // --- generator update (D carries gradient but is not stepped; its
      // grads are zeroed at the top of the next discriminator update) ---
      opt_g.zero_grad();
      double g_loss_now;
      if (conditional) {
        Tensor<float> out = models.cond_g->forward(cond_in, true);
        std::vector<float> df;
        if (cfg.lambda_adv != 0.0) df = models.d->forward(out, true);
        g_loss_now = enhancement_loss(out, real, df, cfg.lambda_rec, cfg.lambda_adv);
        guard_finite(g_loss_now, "g_loss", epoch, static_cast<int>(b));
        Tensor<float> dout(out.shape);
        if (cfg.lambda_adv != 0.0) {
          auto adv = generator_loss_grad(df, GenLossVariant::non_saturating);
          for (auto& a : adv) a *= static_cast<float>(cfg.lambda_adv);
          dout = models.d->backward(adv);
        }
        Tensor<float> rec_grad = enhancement_loss_rec_grad(out, real, cfg.lambda_rec);
        for (size_t i = 0; i < dout.data.size(); ++i) dout.data[i] += rec_grad.data[i];
        models.cond_g->backward(dout);
      } else {
        Tensor<float> img = models.latent_g->forward(sample_z(bs), true);
        std::vector<float> df = models.d->forward(img, true);
        g_loss_now = generator_loss(df, cfg.gen_variant);
        guard_finite(g_loss_now, "g_loss", epoch, static_cast<int>(b));
        auto dconf = generator_loss_grad(df, cfg.gen_variant);
        Tensor<float> dimg = models.d->backward(dconf);
        models.latent_g->backward(dimg);
      }
      opt_g.step();

      rec.g_loss = g_loss_now;
      if (log) log->push_back(rec);
    }
    if (sink) sink(epoch, models);
  }
  return models;
}

void write_loss_csv(const std::string& path, const std::vector<GanBatchRecord>& log) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write loss csv: " + path);
  out << "epoch,batch,d_loss,g_loss,v_estimate\n";
  out.precision(10);
  for (const auto& r : log)
    out << r.epoch << "," << r.batch << "," << r.d_loss << "," << r.g_loss << ","
        << r.v_estimate << "\n";
}

}  // namespace wildgan
