#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "wildgan/matching.hpp"
#include "wildgan/tensor.hpp"

namespace wildgan {

template <typename T>
struct DetectionLossGrads {
  Tensor<T> dloc;   // [A, 4]
  Tensor<T> dconf;  // [A, C+1]
};

namespace detail {

// softmax row in double with max subtraction
inline void softmax_row(const double* z, int n, std::vector<double>& p) {
  p.resize(static_cast<size_t>(n));
  double mx = z[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, z[i]);
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    p[static_cast<size_t>(i)] = std::exp(z[i] - mx);
    sum += p[static_cast<size_t>(i)];
  }
  for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] /= sum;
}

}  // namespace detail

// Per-image single-shot loss:
//   (1/N_pos) * [ smooth-L1 over matched anchors
//                 + cross-entropy over matched anchors
//                 + cross-entropy over the top (ratio*N_pos) hardest
//                   background anchors (ranked by background CE, ties to the
//                   lower anchor index) ]
// Smooth-L1 transitions at |d| = 1. Returns 0 (zero grads) when N_pos = 0.
// gt_classes holds the foreground class index per ground truth; the score
// column for foreground class c is c+1 (0 is background).
template <typename T>
double detection_loss(const Tensor<T>& loc, const Tensor<T>& conf,
                      const MatchResult& match, const std::vector<int>& gt_classes,
                      int neg_pos_ratio = 3, DetectionLossGrads<T>* grads = nullptr) {
  const int a_total = loc.dim(0);
  const int cc = conf.dim(1);
  if (loc.ndim() != 2 || loc.dim(1) != 4)
    throw ShapeError("detection_loss: loc must be [A,4]");
  if (conf.ndim() != 2 || conf.dim(0) != a_total)
    throw ShapeError("detection_loss: conf row count must match loc");
  if (static_cast<int>(match.anchor_to_gt.size()) != a_total)
    throw ShapeError("detection_loss: match size must equal anchor count");

  if (grads) {
    grads->dloc = Tensor<T>({a_total, 4});
    grads->dconf = Tensor<T>({a_total, cc});
  }
  const int n_pos = match.num_matched;
  if (n_pos == 0) return 0.0;
  const double inv_pos = 1.0 / n_pos;

  double loss = 0.0;
  std::vector<double> zrow(static_cast<size_t>(cc)), prob;
  std::vector<std::pair<double, int>> neg_ce;  // (background CE, anchor idx)

  for (int ai = 0; ai < a_total; ++ai) {
    for (int j = 0; j < cc; ++j)
      zrow[static_cast<size_t>(j)] = static_cast<double>(conf.at2(ai, j));
    detail::softmax_row(zrow.data(), cc, prob);
    const int gi = match.anchor_to_gt[static_cast<size_t>(ai)];
    if (gi >= 0) {
      // localization
      for (int j = 0; j < 4; ++j) {
        const double d = static_cast<double>(loc.at2(ai, j)) -
                         match.anchor_offsets[static_cast<size_t>(ai)][static_cast<size_t>(j)];
        const double ad = std::abs(d);
        loss += inv_pos * (ad < 1.0 ? 0.5 * d * d : ad - 0.5);
        if (grads)
          grads->dloc.at2(ai, j) =
              static_cast<T>(inv_pos * (ad < 1.0 ? d : (d > 0 ? 1.0 : -1.0)));
      }
      // classification toward the gt class
      const int cls = gt_classes[static_cast<size_t>(gi)] + 1;
      if (cls < 1 || cls >= cc)
        throw ValidationError("detection_loss: gt class out of range");
      loss += inv_pos * -std::log(std::max(prob[static_cast<size_t>(cls)], 1e-300));
      if (grads)
        for (int j = 0; j < cc; ++j)
          grads->dconf.at2(ai, j) = static_cast<T>(
              inv_pos * (prob[static_cast<size_t>(j)] - (j == cls ? 1.0 : 0.0)));
    } else {
      neg_ce.push_back({-std::log(std::max(prob[0], 1e-300)), ai});
    }
  }

  // hard negative mining at ratio : 1
  const size_t keep = std::min(neg_ce.size(), static_cast<size_t>(neg_pos_ratio) *
                                                  static_cast<size_t>(n_pos));
  std::sort(neg_ce.begin(), neg_ce.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (size_t k = 0; k < keep; ++k) {
    const int ai = neg_ce[k].second;
    loss += inv_pos * neg_ce[k].first;
    if (grads) {
      for (int j = 0; j < cc; ++j)
        zrow[static_cast<size_t>(j)] = static_cast<double>(conf.at2(ai, j));
      detail::softmax_row(zrow.data(), cc, prob);
      for (int j = 0; j < cc; ++j)
        grads->dconf.at2(ai, j) = static_cast<T>(
            inv_pos * (prob[static_cast<size_t>(j)] - (j == 0 ? 1.0 : 0.0)));
    }
  }
  return loss;
}

}  // namespace wildgan
