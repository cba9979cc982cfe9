#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wildgan/annotations.hpp"
#include "wildgan/image.hpp"

namespace wildgan {

// Bundled synthetic datasets: colored shapes (square/circle/triangle/cross)
// on textured backgrounds. Kinds:
//   gan32     - single-shape 32x32 images + labels.jsonl (GAN + probe corpus)
//   pairs     - clean 64x64 scenes + their degraded 32x32 counterparts
//   scenes    - clean 64x64 multi-shape scenes + annotations.jsonl
//   benchmark - degraded frames + annotations.jsonl (+ clean references)
// Everything is a pure function of (kind, seed, count, size).
struct CorpusOptions {
  std::string kind = "gan32";
  uint64_t seed = 0;
  int count = 0;  // 0 = kind default
  int size = 0;   // 0 = kind default (clean side)
};

void make_corpus(const std::string& out_dir, const CorpusOptions& opts);

// Degradation shared by the pairs and benchmark kinds (and the acceptance
// experiments): downscale 2x, brightness 0.35, noise 0.02.
DegradationParams wild_degradation(uint64_t seed);

// In-memory generators used by tests and the CLI alike.
ImageTensor make_shape_image(int size, int class_id, uint64_t seed);
ImageTensor make_scene(int size, uint64_t seed, Annotation* annotation,
                       const std::string& image_id);

const std::vector<std::string>& shape_class_names();

// Loaders for the on-disk corpus layouts.
struct LabeledCorpus {
  std::vector<ImageTensor> images;
  std::vector<int> labels;                // indices into class_names
  std::vector<std::string> class_names;   // sorted unique labels
};
LabeledCorpus load_labeled_corpus(const std::string& dir);  // labels.jsonl layout

struct PairedCorpus {
  std::vector<ImageTensor> degraded;
  std::vector<ImageTensor> clean;
};
PairedCorpus load_paired_corpus(const std::string& dir);  // clean/ + degraded/

struct AnnotatedCorpus {
  std::vector<ImageTensor> images;
  std::vector<Annotation> annotations;
};
AnnotatedCorpus load_annotated_corpus(const std::string& dir);  // annotations.jsonl

}  // namespace wildgan
