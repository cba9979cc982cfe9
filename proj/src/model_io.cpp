#include "wildgan/model_io.hpp"

namespace wildgan {

namespace {

Tensor<float> to_f32(const std::vector<double>& v, std::vector<int> shape) {
  Tensor<float> t(std::move(shape));
  for (size_t i = 0; i < v.size(); ++i) t.data[i] = static_cast<float>(v[i]);
  return t;
}

std::vector<double> to_f64(const Tensor<float>& t) {
  return std::vector<double>(t.data.begin(), t.data.end());
}

}  // namespace

void save_probe(const std::string& dir, const LinearProbe& probe) {
  CheckpointData data;
  data.kind = "probe";
  data.arch = {{"model", "probe"},
               {"num_classes", probe.num_classes},
               {"dim", probe.dim},
               {"l2_strength", probe.l2_strength}};
  data.tensors.emplace("probe.weights",
                       to_f32(probe.weights, {probe.num_classes, probe.dim}));
  data.tensors.emplace("probe.bias", to_f32(probe.bias, {probe.num_classes}));
  data.tensors.emplace("probe.feat_mean", to_f32(probe.feat_mean, {probe.dim}));
  data.tensors.emplace("probe.feat_scale", to_f32(probe.feat_scale, {probe.dim}));
  save_checkpoint(dir, data);
}

LinearProbe load_probe(const std::string& dir) {
  CheckpointData data = load_checkpoint(dir);
  check_kind(data, "probe", dir);
  LinearProbe p;
  p.num_classes = data.arch.at("num_classes").get<int>();
  p.dim = data.arch.at("dim").get<int>();
  p.l2_strength = data.arch.at("l2_strength").get<double>();
  p.weights = to_f64(data.tensors.at("probe.weights"));
  p.bias = to_f64(data.tensors.at("probe.bias"));
  p.feat_mean = to_f64(data.tensors.at("probe.feat_mean"));
  p.feat_scale = to_f64(data.tensors.at("probe.feat_scale"));
  if (static_cast<int>(p.weights.size()) != p.num_classes * p.dim)
    throw ShapeError("probe checkpoint: weight size mismatch");
  return p;
}

}  // namespace wildgan
