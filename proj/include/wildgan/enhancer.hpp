#pragma once

#include <string>
#include <vector>

#include "wildgan/image.hpp"
#include "wildgan/models.hpp"

namespace wildgan {

// Target geometry for enhancement. tile_size 0 processes the whole frame;
// otherwise overlapping tiles (8 px overlap, linear blending) bound memory on
// large frames.
struct EnhanceSpec {
  int target_width = 0;
  int target_height = 0;
  int tile_size = 0;
  std::string checkpoint_ref;
};

// Bilinear pre-resize to the exact target, then the conditional generator's
// refinement pass. Output is exactly target_height x target_width, in [-1,1].
ImageTensor enhance_frame(ConditionalGenerator<float>& g, const ImageTensor& frame,
                          const EnhanceSpec& spec);

// Element-wise enhance_frame over a sequence, order preserved. Per-frame
// failures are rethrown with the frame index.
std::vector<ImageTensor> enhance_stream(ConditionalGenerator<float>& g,
                                        const std::vector<ImageTensor>& frames,
                                        const EnhanceSpec& spec);

}  // namespace wildgan
