#pragma once

#include <string>
#include <vector>

namespace wildgan {

// Pixel-space corner box, [min, max) convention.
struct PixelBox {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

struct AnnotatedObject {
  std::string class_label;
  PixelBox bbox;
};

// Ground truth for one image: the "image" field is a path relative to the
// annotation file's directory.
struct Annotation {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<AnnotatedObject> objects;
};

// JSON Lines, one image per line:
//   {"image": "...", "width": W, "height": H,
//    "objects": [{"class": "...", "bbox": [xmin, ymin, xmax, ymax]}]}
std::vector<Annotation> load_annotations(const std::string& path);
void save_annotations(const std::string& path, const std::vector<Annotation>& anns);

// Sorted unique class labels across all objects.
std::vector<std::string> class_vocabulary(const std::vector<Annotation>& anns);

}  // namespace wildgan
