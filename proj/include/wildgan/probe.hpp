#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wildgan/image.hpp"
#include "wildgan/models.hpp"

namespace wildgan {

// Concatenation of per-layer 4x4-max-pooled discriminator activations.
// Blocks are flattened channel-major (channel, then pool row, pool col) in
// layer order; length is 16 * sum of layer channel counts.
struct ProbeVector {
  struct Block {
    int layer = 0;
    int channels = 0;
    int rows = 4;
    int cols = 4;
  };
  std::vector<double> values;
  std::vector<Block> layout;
};

// Regularized multinomial linear model over standardized probe features.
struct LinearProbe {
  int num_classes = 0;
  int dim = 0;
  std::vector<double> weights;     // [num_classes, dim]
  std::vector<double> bias;        // [num_classes]
  std::vector<double> feat_mean;   // standardization, from the training set
  std::vector<double> feat_scale;  // 1 / max(std, 1e-8)
  double l2_strength = 0.0;
};

// Max-pool every conv layer's post-activation map to a 4x4 grid (windows of
// size ceil(h/4) x ceil(w/4); window i starts at min(i*s, h-s), which tiles
// the map and clamps the last windows to its edge), flatten, concatenate.
// The image must match the discriminator input and every tapped map must be
// at least 4x4.
ProbeVector extract_features(Discriminator<float>& d, const ImageTensor& image);

// Expected probe length for a channel ladder: 16 * sum(channels).
int64_t probe_length(const std::vector<int>& conv_channels);

// Full-batch gradient descent with backtracking line search on
// cross-entropy + l2*||W||^2 (bias unpenalized), from zero init, until the
// gradient norm falls below 1e-5 or the iteration cap. Deterministic; the
// seed parameter is kept for interface stability but the zero-init path does
// not consume randomness.
LinearProbe train_linear_probe(const std::vector<ProbeVector>& features,
                               const std::vector<int>& labels, double l2_strength,
                               uint64_t seed, int max_iters = 1000);

struct ProbePrediction {
  int class_id = 0;
  std::vector<double> probabilities;
};

// softmax(W v + b); argmax with lowest-index tie-break.
ProbePrediction probe_predict(const LinearProbe& p, const ProbeVector& v);

// Loss trace of the last train_linear_probe call is returned through this
// optional overload for the monotonicity property test.
LinearProbe train_linear_probe_traced(const std::vector<ProbeVector>& features,
                                      const std::vector<int>& labels, double l2_strength,
                                      uint64_t seed, int max_iters,
                                      std::vector<double>* loss_trace);

}  // namespace wildgan
