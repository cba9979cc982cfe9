#include "wildgan/probe.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wildgan/error.hpp"

namespace wildgan {

int64_t probe_length(const std::vector<int>& conv_channels) {
  int64_t n = 0;
  for (int c : conv_channels) n += c;
  return 16 * n;
}

ProbeVector extract_features(Discriminator<float>& d, const ImageTensor& image) {
  validate_image(image, "extract_features input");
  if (image.height != d.image_size() || image.width != d.image_size())
    throw ValidationError("extract_features: image must be " +
                          std::to_string(d.image_size()) + "x" +
                          std::to_string(d.image_size()));
  Tensor<float> x = pack_nchw_one(image);
  std::vector<Tensor<float>> maps = d.feature_maps(x);

  ProbeVector out;
  for (size_t li = 0; li < maps.size(); ++li) {
    const Tensor<float>& m = maps[li];
    const int ch = m.dim(1), h = m.dim(2), w = m.dim(3);
    if (h < 4 || w < 4)
      throw ValidationError("extract_features: layer " + std::to_string(li) +
                            " map is below 4x4");
    const int sh = (h + 3) / 4, sw = (w + 3) / 4;
    for (int c = 0; c < ch; ++c)
      for (int py = 0; py < 4; ++py) {
        const int y0 = std::min(py * sh, h - sh);
        for (int px = 0; px < 4; ++px) {
          const int x0 = std::min(px * sw, w - sw);
          float best = m.at4(0, c, y0, x0);
          for (int y = y0; y < y0 + sh; ++y)
            for (int xx = x0; xx < x0 + sw; ++xx) best = std::max(best, m.at4(0, c, y, xx));
          out.values.push_back(static_cast<double>(best));
        }
      }
    out.layout.push_back({static_cast<int>(li), ch, 4, 4});
  }
  return out;
}

namespace {

struct ProbeProblem {
  int n = 0, dim = 0, classes = 0;
  const std::vector<ProbeVector>* feats = nullptr;
  const std::vector<int>* labels = nullptr;
  std::vector<double> mean, scale;
  double l2 = 0;

  double standardized(int i, int j) const {
    return ((*feats)[static_cast<size_t>(i)].values[static_cast<size_t>(j)] -
            mean[static_cast<size_t>(j)]) *
           scale[static_cast<size_t>(j)];
  }

  // cross-entropy + l2*||W||^2 and its gradient
  double eval(const std::vector<double>& w, const std::vector<double>& b,
              std::vector<double>* gw, std::vector<double>* gb) const {
    if (gw) {
      gw->assign(w.size(), 0.0);
      gb->assign(b.size(), 0.0);
    }
    double loss = 0;
    std::vector<double> z(static_cast<size_t>(classes));
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < classes; ++c) {
        double acc = b[static_cast<size_t>(c)];
        const double* wr = w.data() + static_cast<size_t>(c) * dim;
        for (int j = 0; j < dim; ++j) acc += wr[j] * standardized(i, j);
        z[static_cast<size_t>(c)] = acc;
      }
      const double mx = *std::max_element(z.begin(), z.end());
      double sum = 0;
      for (int c = 0; c < classes; ++c) {
        z[static_cast<size_t>(c)] = std::exp(z[static_cast<size_t>(c)] - mx);
        sum += z[static_cast<size_t>(c)];
      }
      const int y = (*labels)[static_cast<size_t>(i)];
      loss += -std::log(std::max(z[static_cast<size_t>(y)] / sum, 1e-300)) / n;
      if (gw) {
        for (int c = 0; c < classes; ++c) {
          const double p = z[static_cast<size_t>(c)] / sum;
          const double g = (p - (c == y ? 1.0 : 0.0)) / n;
          (*gb)[static_cast<size_t>(c)] += g;
          double* gwr = gw->data() + static_cast<size_t>(c) * dim;
          for (int j = 0; j < dim; ++j) gwr[j] += g * standardized(i, j);
        }
      }
    }
    for (size_t k = 0; k < w.size(); ++k) {
      loss += l2 * w[k] * w[k];
      if (gw) (*gw)[k] += 2.0 * l2 * w[k];
    }
    return loss;
  }
};

}  // namespace

LinearProbe train_linear_probe_traced(const std::vector<ProbeVector>& features,
                                      const std::vector<int>& labels, double l2_strength,
                                      uint64_t seed, int max_iters,
                                      std::vector<double>* loss_trace) {
  (void)seed;
  if (features.empty() || features.size() != labels.size())
    throw ValidationError("train_linear_probe: features/labels size mismatch");
  if (l2_strength < 0) throw ValidationError("train_linear_probe: l2 must be >= 0");
  const int dim = static_cast<int>(features[0].values.size());
  for (const auto& f : features)
    if (static_cast<int>(f.values.size()) != dim)
      throw ShapeError("train_linear_probe: inconsistent feature lengths");
  std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2)
    throw ValidationError("train_linear_probe: need at least 2 classes present");
  for (int y : present)
    if (y < 0) throw ValidationError("train_linear_probe: negative label");
  const int classes = *present.rbegin() + 1;
  const int n = static_cast<int>(features.size());

  ProbeProblem prob;
  prob.n = n;
  prob.dim = dim;
  prob.classes = classes;
  prob.feats = &features;
  prob.labels = &labels;
  prob.l2 = l2_strength;
  prob.mean.assign(static_cast<size_t>(dim), 0.0);
  prob.scale.assign(static_cast<size_t>(dim), 1.0);
  for (int j = 0; j < dim; ++j) {
    double m = 0;
    for (int i = 0; i < n; ++i) m += features[static_cast<size_t>(i)].values[static_cast<size_t>(j)];
    m /= n;
    double var = 0;
    for (int i = 0; i < n; ++i) {
      const double d = features[static_cast<size_t>(i)].values[static_cast<size_t>(j)] - m;
      var += d * d;
    }
    var /= n;
    prob.mean[static_cast<size_t>(j)] = m;
    prob.scale[static_cast<size_t>(j)] = 1.0 / std::max(std::sqrt(var), 1e-8);
  }

  std::vector<double> w(static_cast<size_t>(classes) * dim, 0.0);
  std::vector<double> b(static_cast<size_t>(classes), 0.0);
  std::vector<double> gw, gb;
  double step = 1.0;
  double loss = prob.eval(w, b, &gw, &gb);
  if (loss_trace) loss_trace->push_back(loss);

  for (int it = 0; it < max_iters; ++it) {
    double gnorm2 = 0;
    for (double g : gw) gnorm2 += g * g;
    for (double g : gb) gnorm2 += g * g;
    if (std::sqrt(gnorm2) <= 1e-5) break;

    // backtracking (Armijo) line search along -grad
    step *= 2.0;
    std::vector<double> w2(w.size()), b2(b.size());
    double new_loss = 0;
    for (;;) {
      for (size_t k = 0; k < w.size(); ++k) w2[k] = w[k] - step * gw[k];
      for (size_t k = 0; k < b.size(); ++k) b2[k] = b[k] - step * gb[k];
      new_loss = prob.eval(w2, b2, nullptr, nullptr);
      if (new_loss <= loss - 1e-4 * step * gnorm2 || step < 1e-16) break;
      step *= 0.5;
    }
    if (new_loss > loss) break;  // numerically stuck; keep the monotone iterate
    w.swap(w2);
    b.swap(b2);
    loss = prob.eval(w, b, &gw, &gb);
    if (loss_trace) loss_trace->push_back(loss);
  }

  LinearProbe out;
  out.num_classes = classes;
  out.dim = dim;
  out.weights = std::move(w);
  out.bias = std::move(b);
  out.feat_mean = std::move(prob.mean);
  out.feat_scale = std::move(prob.scale);
  out.l2_strength = l2_strength;
  return out;
}

LinearProbe train_linear_probe(const std::vector<ProbeVector>& features,
                               const std::vector<int>& labels, double l2_strength,
                               uint64_t seed, int max_iters) {
  return train_linear_probe_traced(features, labels, l2_strength, seed, max_iters,
                                   nullptr);
}

ProbePrediction probe_predict(const LinearProbe& p, const ProbeVector& v) {
  if (static_cast<int>(v.values.size()) != p.dim)
    throw ShapeError("probe_predict: feature length " + std::to_string(v.values.size()) +
                     " != probe dim " + std::to_string(p.dim));
  std::vector<double> z(static_cast<size_t>(p.num_classes));
  for (int c = 0; c < p.num_classes; ++c) {
    double acc = p.bias[static_cast<size_t>(c)];
    const double* wr = p.weights.data() + static_cast<size_t>(c) * p.dim;
    for (int j = 0; j < p.dim; ++j)
      acc += wr[j] * (v.values[static_cast<size_t>(j)] - p.feat_mean[static_cast<size_t>(j)]) *
             p.feat_scale[static_cast<size_t>(j)];
    z[static_cast<size_t>(c)] = acc;
  }
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (auto& zi : z) {
    zi = std::exp(zi - mx);
    sum += zi;
  }
  ProbePrediction pred;
  pred.probabilities.resize(z.size());
  int best = 0;
  for (size_t c = 0; c < z.size(); ++c) {
    pred.probabilities[c] = z[c] / sum;
    if (pred.probabilities[c] > pred.probabilities[static_cast<size_t>(best)])
      best = static_cast<int>(c);
  }
  pred.class_id = best;
  return pred;
}

}  // namespace wildgan
