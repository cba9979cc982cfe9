#pragma once

#include "wildgan/checkpoint.hpp"
#include "wildgan/layers.hpp"

namespace wildgan {

// Snapshot of a model's parameters and buffers as float32 tensors.
template <typename Model>
CheckpointData snapshot_model(Model& model, const std::string& kind) {
  CheckpointData data;
  data.kind = kind;
  data.arch = model.arch();
  auto params = model.params();
  for (auto& p : params) {
    Tensor<float> t(p.param->value.shape);
    for (size_t i = 0; i < t.data.size(); ++i)
      t.data[i] = static_cast<float>(p.param->value.data[i]);
    data.tensors.emplace(p.name, std::move(t));
  }
  for (auto& b : model.buffers()) {
    Tensor<float> t(b.tensor->shape);
    for (size_t i = 0; i < t.data.size(); ++i)
      t.data[i] = static_cast<float>(b.tensor->data[i]);
    data.tensors.emplace(b.name, std::move(t));
  }
  return data;
}

// Fills a constructed model from checkpoint tensors; every model tensor must
// be present with a matching shape.
template <typename Model>
void restore_model(Model& model, const CheckpointData& data) {
  auto assign = [&](const std::string& name, auto* dst) {
    auto it = data.tensors.find(name);
    if (it == data.tensors.end())
      throw ShapeError("checkpoint missing tensor '" + name + "'");
    if (it->second.shape != dst->shape)
      throw ShapeError("checkpoint tensor '" + name + "' shape " +
                       it->second.shape_str() + " does not match model " +
                       dst->shape_str());
    for (size_t i = 0; i < dst->data.size(); ++i)
      dst->data[i] = it->second.data[i];
  };
  for (auto& p : model.params()) assign(p.name, &p.param->value);
  for (auto& b : model.buffers()) assign(b.name, b.tensor);
}

}  // namespace wildgan
