#pragma once

#include <string>
#include <vector>

#include "wildgan/image.hpp"

namespace wildgan {

// Frames at indices 0, stride, 2*stride, ... converted to [-1,1] RGB.
// Accepts any container the platform decoder handles.
std::vector<ImageTensor> extract_frames(const std::string& video_path, int stride);

}  // namespace wildgan
