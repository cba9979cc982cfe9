#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "wildgan/layers.hpp"
#include "wildgan/resample.hpp"
#include "wildgan/rng.hpp"

namespace wildgan {

enum class NoiseDistribution { uniform, gaussian };

inline NoiseDistribution noise_distribution_from_string(const std::string& s) {
  if (s == "uniform") return NoiseDistribution::uniform;
  if (s == "gaussian") return NoiseDistribution::gaussian;
  throw ValidationError("unknown noise distribution: " + s);
}

// Batch of noise vectors, one row per sample. Uniform draws are i.i.d. on
// [0,1); the gaussian alternative is standard normal.
template <typename T>
Tensor<T> sample_noise(int n, int dim, uint64_t seed,
                       NoiseDistribution dist = NoiseDistribution::uniform) {
  if (n < 1 || dim < 1)
    throw ValidationError("sample_noise: n and dim must be positive");
  Rng rng(seed);
  Tensor<T> z({n, dim});
  for (auto& v : z.data)
    v = static_cast<T>(dist == NoiseDistribution::uniform ? rng.uniform()
                                                          : rng.gaussian());
  return z;
}

// Noise-to-image DCGAN generator: linear projection to 4x4 feature maps,
// then stride-2 up-convolutions down to 3 channels, tanh output.
// image_size 32 gives the 256->128->64->3 ladder.
template <typename T>
class LatentGenerator {
 public:
  LatentGenerator(int noise_dim, int image_size, Rng& rng, int base_channels = 64)
      : noise_dim_(noise_dim), image_size_(image_size), base_ch_(base_channels) {
    if (noise_dim < 1) throw ValidationError("generator: noise_dim must be positive");
    int ups = 0;
    for (int s = 4; s < image_size; s *= 2) ++ups;
    if ((4 << ups) != image_size || ups < 1)
      throw ValidationError("generator: image_size must be 4*2^k, k>=1");
    const int ch0 = base_ch_ << (ups - 1);
    net_.template add<nn::Dense<T>>("proj", noise_dim, ch0 * 16, rng);
    net_.template add<nn::Reshape<T>>("reshape", std::vector<int>{ch0, 4, 4});
    net_.template add<nn::BatchNorm2d<T>>("bn0", ch0);
    net_.template add<nn::ReLU<T>>("relu0");
    int ch = ch0;
    for (int i = 0; i < ups - 1; ++i) {
      net_.template add<nn::ConvTranspose2d<T>>("up" + std::to_string(i + 1), ch,
                                                ch / 2, 4, 2, 1, rng);
      net_.template add<nn::BatchNorm2d<T>>("bn" + std::to_string(i + 1), ch / 2);
      net_.template add<nn::ReLU<T>>("relu" + std::to_string(i + 1));
      ch /= 2;
    }
    net_.template add<nn::ConvTranspose2d<T>>("up" + std::to_string(ups), ch, 3, 4, 2,
                                              1, rng);
    net_.template add<nn::Tanh<T>>("tanh");
  }

  Tensor<T> forward(const Tensor<T>& noise, bool train) {
    if (noise.ndim() != 2 || noise.dim(1) != noise_dim_)
      throw ShapeError("generator: noise batch " + noise.shape_str() +
                       " does not match noise_dim=" + std::to_string(noise_dim_));
    return net_.forward(noise, train);
  }

  Tensor<T> backward(const Tensor<T>& d_image) { return net_.backward(d_image); }

  std::vector<nn::ParamRef<T>> params() {
    std::vector<nn::ParamRef<T>> out;
    net_.collect_params("g", out);
    return out;
  }
  std::vector<nn::BufferRef<T>> buffers() {
    std::vector<nn::BufferRef<T>> out;
    net_.collect_buffers("g", out);
    return out;
  }

  int noise_dim() const { return noise_dim_; }
  int image_size() const { return image_size_; }

  nlohmann::json arch() const {
    return {{"model", "generator_latent"},
            {"noise_dim", noise_dim_},
            {"image_size", image_size_},
            {"base_channels", base_ch_}};
  }

 private:
  int noise_dim_, image_size_, base_ch_;
  nn::Sequential<T> net_;
};

// Strided-conv discriminator mirroring the generator ladder; leaky-ReLU 0.2,
// no normalization on the first layer, scalar sigmoid head. conv_channels() is
// 64/128/256 for 32x32 inputs.
template <typename T>
class Discriminator {
 public:
  explicit Discriminator(int image_size, Rng& rng, int base_channels = 64)
      : image_size_(image_size), base_ch_(base_channels) {
    int downs = 0;
    for (int s = image_size; s > 4; s /= 2) ++downs;
    if ((4 << downs) != image_size || downs < 1)
      throw ValidationError("discriminator: image_size must be 4*2^k, k>=1");
    int in_ch = 3, sz = image_size;
    for (int i = 0; i < downs; ++i) {
      const int out_ch = std::min(8 * base_ch_, base_ch_ << i);
      net_.template add<nn::Conv2d<T>>("conv" + std::to_string(i + 1), in_ch, out_ch, 4,
                                       2, 1, rng);
      if (i > 0)
        net_.template add<nn::BatchNorm2d<T>>("bn" + std::to_string(i + 1), out_ch);
      net_.template add<nn::LeakyReLU<T>>("lrelu" + std::to_string(i + 1), 0.2);
      taps_.push_back(net_.size() - 1);
      channels_.push_back(out_ch);
      in_ch = out_ch;
      sz /= 2;
    }
    net_.template add<nn::Reshape<T>>("flatten", std::vector<int>{in_ch * sz * sz});
    net_.template add<nn::Dense<T>>("head", in_ch * sz * sz, 1, rng);
    net_.template add<nn::Sigmoid<T>>("sigmoid");
  }

  // One confidence per image, strictly inside (0,1).
  std::vector<T> forward(const Tensor<T>& images, bool train) {
    check_input(images);
    Tensor<T> y = net_.forward(images, train);
    return std::vector<T>(y.data.begin(), y.data.end());
  }

  Tensor<T> backward(const std::vector<T>& d_conf) {
    Tensor<T> dy({static_cast<int>(d_conf.size()), 1});
    std::copy(d_conf.begin(), d_conf.end(), dy.data.begin());
    return net_.backward(dy);
  }

  // Post-activation feature maps of every conv block, eval-mode statistics.
  std::vector<Tensor<T>> feature_maps(const Tensor<T>& images) {
    check_input(images);
    std::vector<Tensor<T>> taps;
    net_.forward_collect(images, /*train=*/false, taps_, taps);
    return taps;
  }

  std::vector<nn::ParamRef<T>> params() {
    std::vector<nn::ParamRef<T>> out;
    net_.collect_params("d", out);
    return out;
  }
  std::vector<nn::BufferRef<T>> buffers() {
    std::vector<nn::BufferRef<T>> out;
    net_.collect_buffers("d", out);
    return out;
  }

  const std::vector<int>& conv_channels() const { return channels_; }
  int image_size() const { return image_size_; }

  nlohmann::json arch() const {
    return {{"model", "discriminator"},
            {"image_size", image_size_},
            {"base_channels", base_ch_}};
  }

 private:
  void check_input(const Tensor<T>& images) const {
    if (images.ndim() != 4 || images.dim(1) != 3 || images.dim(2) != image_size_ ||
        images.dim(3) != image_size_)
      throw ShapeError("discriminator: input " + images.shape_str() + " expected [N,3," +
                       std::to_string(image_size_) + "," + std::to_string(image_size_) +
                       "]");
  }

  int image_size_, base_ch_;
  nn::Sequential<T> net_;
  std::vector<size_t> taps_;
  std::vector<int> channels_;
};

// Image-to-image enhancement generator: bilinear resize to the configured
// output resolution, then a stride-1 residual conv stack. The final conv is
// zero-initialized, so a fresh model is the exact identity after resize.
// Output = clamp(resized + residual, -1, 1).
template <typename T>
class ConditionalGenerator {
 public:
  ConditionalGenerator(int out_h, int out_w, int hidden_channels, int hidden_layers,
                       Rng& rng)
      : out_h_(out_h), out_w_(out_w), hidden_ch_(hidden_channels),
        hidden_layers_(hidden_layers) {
    if (out_h < 1 || out_w < 1)
      throw ValidationError("conditional generator: invalid output size");
    if (hidden_layers < 1)
      throw ValidationError("conditional generator: need >= 1 hidden layer");
    body_.template add<nn::Conv2d<T>>("conv_in", 3, hidden_channels, 3, 1, 1, rng);
    body_.template add<nn::LeakyReLU<T>>("lrelu_in", 0.2);
    for (int i = 1; i < hidden_layers; ++i) {
      body_.template add<nn::Conv2d<T>>("conv" + std::to_string(i), hidden_channels,
                                        hidden_channels, 3, 1, 1, rng);
      body_.template add<nn::LeakyReLU<T>>("lrelu" + std::to_string(i), 0.2);
    }
    auto* out = body_.template add<nn::Conv2d<T>>("conv_out", hidden_channels, 3, 3, 1,
                                                  1, rng);
    out->w.value.fill(T(0));  // identity start
  }

  Tensor<T> forward(const Tensor<T>& images, bool train) {
    return forward_at(images, out_h_, out_w_, train);
  }

  Tensor<T> forward_at(const Tensor<T>& images, int oh, int ow, bool train) {
    if (images.ndim() != 4 || images.dim(1) != 3)
      throw ShapeError("conditional generator: input must be [N,3,H,W], got " +
                       images.shape_str());
    resized_ = resize_bilinear_nchw(images, oh, ow);
    Tensor<T> r = body_.forward(resized_, train);
    Tensor<T> y(r.shape);
    pass_.assign(y.data.size(), 1);
    for (size_t i = 0; i < y.data.size(); ++i) {
      const T v = resized_.data[i] + r.data[i];
      if (v > T(1)) {
        y.data[i] = T(1);
        pass_[i] = 0;
      } else if (v < T(-1)) {
        y.data[i] = T(-1);
        pass_[i] = 0;
      } else {
        y.data[i] = v;
      }
    }
    return y;
  }

  // Gradient flows to the residual stack only; the resized input is data.
  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dr = dy;
    for (size_t i = 0; i < dr.data.size(); ++i)
      if (!pass_[i]) dr.data[i] = T(0);
    return body_.backward(dr);
  }

  std::vector<nn::ParamRef<T>> params() {
    std::vector<nn::ParamRef<T>> out;
    body_.collect_params("g", out);
    return out;
  }
  std::vector<nn::BufferRef<T>> buffers() {
    std::vector<nn::BufferRef<T>> out;
    body_.collect_buffers("g", out);
    return out;
  }

  int out_h() const { return out_h_; }
  int out_w() const { return out_w_; }

  nlohmann::json arch() const {
    return {{"model", "generator_conditional"},
            {"out_h", out_h_},
            {"out_w", out_w_},
            {"hidden_channels", hidden_ch_},
            {"hidden_layers", hidden_layers_}};
  }

 private:
  int out_h_, out_w_, hidden_ch_, hidden_layers_;
  nn::Sequential<T> body_;
  Tensor<T> resized_;
  std::vector<uint8_t> pass_;
};

}  // namespace wildgan
