#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "wildgan/anchors.hpp"
#include "wildgan/layers.hpp"

namespace wildgan {

// Single-shot detector topology. The backbone reuses the discriminator's
// stride-2 conv ladder (curtailed: no scalar head) as the base network and
// appends extra stride-2 layers; prediction heads sit on the last head_maps
// feature maps.
struct DetectorConfig {
  int input_size = 128;
  std::vector<int> base_channels = {64, 128, 256};
  std::vector<int> extra_channels = {256, 256};
  int head_maps = 3;
  std::vector<double> aspects = {1.0, 2.0, 0.5};
  double s_min = 0.2;
  double s_max = 0.9;
  int num_classes = 0;  // foreground classes; scores add a background column

  nlohmann::json to_json() const {
    return {{"input_size", input_size},   {"base_channels", base_channels},
            {"extra_channels", extra_channels}, {"head_maps", head_maps},
            {"aspects", aspects},         {"s_min", s_min},
            {"s_max", s_max},             {"num_classes", num_classes}};
  }
  static DetectorConfig from_json(const nlohmann::json& j) {
    DetectorConfig c;
    c.input_size = j.at("input_size").get<int>();
    c.base_channels = j.at("base_channels").get<std::vector<int>>();
    c.extra_channels = j.at("extra_channels").get<std::vector<int>>();
    c.head_maps = j.at("head_maps").get<int>();
    c.aspects = j.at("aspects").get<std::vector<double>>();
    c.s_min = j.at("s_min").get<double>();
    c.s_max = j.at("s_max").get<double>();
    c.num_classes = j.at("num_classes").get<int>();
    return c;
  }
};

// Per-anchor predictions for a batch: loc [N, A, 4], conf [N, A, C+1].
// Anchor order matches AnchorSet: map-major, then row, col, aspect.
template <typename T>
struct DetectorOutput {
  Tensor<T> loc;
  Tensor<T> conf;
};

template <typename T>
class DetectorNet {
 public:
  DetectorNet(const DetectorConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.num_classes < 1)
      throw ValidationError("detector: need at least one foreground class");
    if (cfg.base_channels.empty())
      throw ValidationError("detector: empty base network");
    std::vector<int> channels = cfg.base_channels;
    channels.insert(channels.end(), cfg.extra_channels.begin(),
                    cfg.extra_channels.end());
    const int n_blocks = static_cast<int>(channels.size());
    if (cfg.head_maps < 1 || cfg.head_maps > n_blocks)
      throw ValidationError("detector: head_maps out of range");

    int in_ch = 3, sz = cfg.input_size;
    std::vector<int> map_sizes;
    for (int i = 0; i < n_blocks; ++i) {
      auto block = std::make_unique<nn::Sequential<T>>();
      block->template add<nn::Conv2d<T>>("conv", in_ch, channels[i], 4, 2, 1, rng);
      if (i > 0) block->template add<nn::BatchNorm2d<T>>("bn", channels[i]);
      block->template add<nn::LeakyReLU<T>>("lrelu", 0.2);
      blocks_.push_back(std::move(block));
      in_ch = channels[i];
      sz = nn::conv_out_size(sz, 4, 2, 1);
      if (sz < 1) throw ValidationError("detector: feature map collapsed to zero");
      map_sizes.push_back(sz);
    }
    // feature-map sizes must strictly decrease along the ladder
    for (size_t i = 1; i < map_sizes.size(); ++i)
      if (map_sizes[i] >= map_sizes[i - 1])
        throw ValidationError("detector: feature-map sizes must strictly decrease");

    const int num_anchors_per_cell = static_cast<int>(cfg.aspects.size());
    std::vector<MapSpec> specs;
    for (int m = 0; m < cfg.head_maps; ++m) {
      const int bi = n_blocks - cfg.head_maps + m;
      head_blocks_.push_back(bi);
      const int ms = map_sizes[static_cast<size_t>(bi)];
      specs.push_back({ms, ms, cfg.aspects});
      loc_heads_.push_back(std::make_unique<nn::Conv2d<T>>(
          channels[static_cast<size_t>(bi)], 4 * num_anchors_per_cell, 3, 1, 1, rng));
      conf_heads_.push_back(std::make_unique<nn::Conv2d<T>>(
          channels[static_cast<size_t>(bi)],
          (cfg.num_classes + 1) * num_anchors_per_cell, 3, 1, 1, rng));
    }
    anchors_ = build_default_boxes(specs, cfg.s_min, cfg.s_max);
    map_sizes_ = map_sizes;
  }

  const AnchorSet& anchors() const { return anchors_; }
  const DetectorConfig& config() const { return cfg_; }

  DetectorOutput<T> forward(const Tensor<T>& images, bool train) {
    if (images.ndim() != 4 || images.dim(1) != 3 ||
        images.dim(2) != cfg_.input_size || images.dim(3) != cfg_.input_size)
      throw ShapeError("detector: input " + images.shape_str() + " expected [N,3," +
                       std::to_string(cfg_.input_size) + "," +
                       std::to_string(cfg_.input_size) + "]");
    const int n = images.dim(0);
    const int num_a = static_cast<int>(cfg_.aspects.size());
    const int cc = cfg_.num_classes + 1;
    DetectorOutput<T> out;
    out.loc = Tensor<T>({n, static_cast<int>(anchors_.size()), 4});
    out.conf = Tensor<T>({n, static_cast<int>(anchors_.size()), cc});

    Tensor<T> h = images;
    int anchor_base = 0, head = 0;
    for (size_t bi = 0; bi < blocks_.size(); ++bi) {
      h = blocks_[bi]->forward(h, train);
      if (head < static_cast<int>(head_blocks_.size()) &&
          head_blocks_[static_cast<size_t>(head)] == static_cast<int>(bi)) {
        Tensor<T> lm = loc_heads_[static_cast<size_t>(head)]->forward(h, train);
        Tensor<T> cm = conf_heads_[static_cast<size_t>(head)]->forward(h, train);
        const int ms = lm.dim(2);
        // channel layout: aspect-major (a*4+coord, a*cc+class)
        for (int i = 0; i < n; ++i)
          for (int r = 0; r < ms; ++r)
            for (int c = 0; c < ms; ++c)
              for (int a = 0; a < num_a; ++a) {
                const int ai = anchor_base + ((r * ms + c) * num_a + a);
                for (int j = 0; j < 4; ++j)
                  out.loc.data[(static_cast<size_t>(i) * anchors_.size() + ai) * 4 + j] =
                      lm.at4(i, a * 4 + j, r, c);
                for (int j = 0; j < cc; ++j)
                  out.conf.data[(static_cast<size_t>(i) * anchors_.size() + ai) * cc + j] =
                      cm.at4(i, a * cc + j, r, c);
              }
        anchor_base += ms * ms * num_a;
        ++head;
      }
    }
    return out;
  }

  // dloc/dconf shaped like the forward output; walks heads and ladder in
  // reverse, summing branch gradients at each tapped block.
  void backward(const Tensor<T>& dloc, const Tensor<T>& dconf) {
    const int n = dloc.dim(0);
    const int num_a = static_cast<int>(cfg_.aspects.size());
    const int cc = cfg_.num_classes + 1;

    // anchor offsets per head
    std::vector<int> bases(head_blocks_.size());
    {
      int base = 0;
      for (size_t m = 0; m < head_blocks_.size(); ++m) {
        bases[m] = base;
        const int ms = map_sizes_[static_cast<size_t>(head_blocks_[m])];
        base += ms * ms * num_a;
      }
    }

    Tensor<T> g;  // running gradient flowing down the ladder
    int head = static_cast<int>(head_blocks_.size()) - 1;
    for (int bi = static_cast<int>(blocks_.size()) - 1; bi >= 0; --bi) {
      if (head >= 0 && head_blocks_[static_cast<size_t>(head)] == bi) {
        const int ms = map_sizes_[static_cast<size_t>(bi)];
        const int ch_loc = 4 * num_a, ch_conf = cc * num_a;
        Tensor<T> dlm({n, ch_loc, ms, ms});
        Tensor<T> dcm({n, ch_conf, ms, ms});
        for (int i = 0; i < n; ++i)
          for (int r = 0; r < ms; ++r)
            for (int c = 0; c < ms; ++c)
              for (int a = 0; a < num_a; ++a) {
                const int ai = bases[static_cast<size_t>(head)] + ((r * ms + c) * num_a + a);
                for (int j = 0; j < 4; ++j)
                  dlm.at4(i, a * 4 + j, r, c) =
                      dloc.data[(static_cast<size_t>(i) * anchors_.size() + ai) * 4 + j];
                for (int j = 0; j < cc; ++j)
                  dcm.at4(i, a * cc + j, r, c) =
                      dconf.data[(static_cast<size_t>(i) * anchors_.size() + ai) * cc + j];
              }
        Tensor<T> dtap = loc_heads_[static_cast<size_t>(head)]->backward(dlm);
        Tensor<T> dtap2 = conf_heads_[static_cast<size_t>(head)]->backward(dcm);
        for (size_t k = 0; k < dtap.data.size(); ++k) dtap.data[k] += dtap2.data[k];
        if (g.empty())
          g = std::move(dtap);
        else
          for (size_t k = 0; k < g.data.size(); ++k) g.data[k] += dtap.data[k];
        --head;
      }
      g = blocks_[static_cast<size_t>(bi)]->backward(g);
    }
  }

  std::vector<nn::ParamRef<T>> params() {
    std::vector<nn::ParamRef<T>> out;
    for (size_t i = 0; i < blocks_.size(); ++i)
      blocks_[i]->collect_params("det.block" + std::to_string(i), out);
    for (size_t m = 0; m < loc_heads_.size(); ++m) {
      loc_heads_[m]->collect_params("det.loc" + std::to_string(m), out);
      conf_heads_[m]->collect_params("det.conf" + std::to_string(m), out);
    }
    return out;
  }
  std::vector<nn::BufferRef<T>> buffers() {
    std::vector<nn::BufferRef<T>> out;
    for (size_t i = 0; i < blocks_.size(); ++i)
      blocks_[i]->collect_buffers("det.block" + std::to_string(i), out);
    return out;
  }

  nlohmann::json arch() const {
    nlohmann::json j = cfg_.to_json();
    j["model"] = "detector";
    return j;
  }

 private:
  DetectorConfig cfg_;
  std::vector<std::unique_ptr<nn::Sequential<T>>> blocks_;
  std::vector<int> head_blocks_;
  std::vector<int> map_sizes_;
  std::vector<std::unique_ptr<nn::Conv2d<T>>> loc_heads_, conf_heads_;
  AnchorSet anchors_;
};

}  // namespace wildgan
