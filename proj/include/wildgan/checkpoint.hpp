#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wildgan/tensor.hpp"

namespace wildgan {

// A checkpoint is a directory: manifest.json plus one raw little-endian
// float32 blob per tensor under tensors/. save -> load -> save is
// byte-identical. Writes go to a temp directory first and are renamed into
// place, so a checkpoint path never holds partial state.
struct CheckpointData {
  int format_version = 1;
  std::string kind;      // generator_latent | generator_conditional | discriminator | detector | probe
  nlohmann::json arch;   // enough to rebuild the layer spec
  std::map<std::string, Tensor<float>> tensors;
};

void save_checkpoint(const std::string& dir, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& dir);

// Typed save/load between a model's named parameters/buffers (any scalar) and
// the float32 on-disk form. Declared here, defined in checkpoint_io.hpp to
// keep the template out of this interface.

}  // namespace wildgan
