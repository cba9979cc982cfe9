#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "wildgan/error.hpp"
#include "wildgan/tensor.hpp"

namespace wildgan {

// Confidences are clamped this far from {0,1} before any log. Matches the
// clamp inside the discriminator's sigmoid head.
inline constexpr double kConfidenceEps = 1e-7;

enum class GenLossVariant { saturating, non_saturating };

namespace detail {

template <typename T>
void check_confidences(const std::vector<T>& c, const char* what) {
  if (c.empty()) throw ValidationError(std::string(what) + ": empty confidence batch");
  for (const T& v : c)
    if (!(v >= T(0) && v <= T(1)))
      throw ValidationError(std::string(what) + ": confidence outside [0,1]");
}

inline double clamp_conf(double v) {
  return std::min(1.0 - kConfidenceEps, std::max(kConfidenceEps, v));
}

}  // namespace detail

// -mean[log d_real] - mean[log(1 - d_fake)]; minimizing this maximizes the
// value function log(D(x)) + log(1-D(z')).
template <typename T>
double discriminator_loss(const std::vector<T>& d_real, const std::vector<T>& d_fake) {
  detail::check_confidences(d_real, "discriminator_loss(d_real)");
  detail::check_confidences(d_fake, "discriminator_loss(d_fake)");
  double lr = 0.0, lf = 0.0;
  for (const T& v : d_real) lr += std::log(detail::clamp_conf(v));
  for (const T& v : d_fake) lf += std::log(1.0 - detail::clamp_conf(v));
  return -lr / static_cast<double>(d_real.size()) - lf / static_cast<double>(d_fake.size());
}

// Empirical value-function estimate; by construction the exact negation of
// discriminator_loss.
template <typename T>
double gan_value(const std::vector<T>& d_real, const std::vector<T>& d_fake) {
  return -discriminator_loss(d_real, d_fake);
}

// saturating: mean[log(1 - d_fake)]; non_saturating: -mean[log d_fake].
template <typename T>
double generator_loss(const std::vector<T>& d_fake, GenLossVariant variant) {
  detail::check_confidences(d_fake, "generator_loss");
  double s = 0.0;
  for (const T& v : d_fake) {
    const double c = detail::clamp_conf(v);
    s += variant == GenLossVariant::saturating ? std::log(1.0 - c) : -std::log(c);
  }
  return s / static_cast<double>(d_fake.size());
}

// d(discriminator_loss)/d(conf); zero where the clamp is active. The real and
// fake terms are independent, so each batch can be backpropped on its own.
template <typename T>
std::vector<T> discriminator_loss_grad_real(const std::vector<T>& d_real) {
  std::vector<T> g(d_real.size());
  const double n = static_cast<double>(d_real.size());
  for (size_t i = 0; i < d_real.size(); ++i) {
    const double v = d_real[i];
    g[i] = (v < kConfidenceEps || v > 1.0 - kConfidenceEps)
               ? T(0)
               : static_cast<T>(-1.0 / (n * v));
  }
  return g;
}

template <typename T>
std::vector<T> discriminator_loss_grad_fake(const std::vector<T>& d_fake) {
  std::vector<T> g(d_fake.size());
  const double n = static_cast<double>(d_fake.size());
  for (size_t i = 0; i < d_fake.size(); ++i) {
    const double v = d_fake[i];
    g[i] = (v < kConfidenceEps || v > 1.0 - kConfidenceEps)
               ? T(0)
               : static_cast<T>(1.0 / (n * (1.0 - v)));
  }
  return g;
}

template <typename T>
void discriminator_loss_grad(const std::vector<T>& d_real, const std::vector<T>& d_fake,
                             std::vector<T>& grad_real, std::vector<T>& grad_fake) {
  grad_real = discriminator_loss_grad_real(d_real);
  grad_fake = discriminator_loss_grad_fake(d_fake);
}

template <typename T>
std::vector<T> generator_loss_grad(const std::vector<T>& d_fake, GenLossVariant variant) {
  std::vector<T> g(d_fake.size());
  const double n = static_cast<double>(d_fake.size());
  for (size_t i = 0; i < d_fake.size(); ++i) {
    const double v = d_fake[i];
    if (v < kConfidenceEps || v > 1.0 - kConfidenceEps) {
      g[i] = T(0);
      continue;
    }
    g[i] = variant == GenLossVariant::saturating ? static_cast<T>(-1.0 / (n * (1.0 - v)))
                                                 : static_cast<T>(-1.0 / (n * v));
  }
  return g;
}

// lambda_rec * mean|g - target| + lambda_adv * generator_loss(non_saturating).
template <typename T>
double enhancement_loss(const Tensor<T>& g_output, const Tensor<T>& target_hr,
                        const std::vector<T>& d_fake, double lambda_rec,
                        double lambda_adv) {
  if (!same_shape(g_output, target_hr))
    throw ShapeError("enhancement_loss: output " + g_output.shape_str() +
                     " vs target " + target_hr.shape_str());
  double mae = 0.0;
  for (size_t i = 0; i < g_output.data.size(); ++i)
    mae += std::abs(static_cast<double>(g_output.data[i]) - target_hr.data[i]);
  mae /= static_cast<double>(g_output.data.size());
  double adv = 0.0;
  if (lambda_adv != 0.0)
    adv = generator_loss(d_fake, GenLossVariant::non_saturating);
  return lambda_rec * mae + lambda_adv * adv;
}

// Gradient of the reconstruction term with respect to g_output. The adversarial
// term's gradient reaches g_output through the discriminator, not here.
template <typename T>
Tensor<T> enhancement_loss_rec_grad(const Tensor<T>& g_output, const Tensor<T>& target_hr,
                                    double lambda_rec) {
  Tensor<T> g(g_output.shape);
  const double scale = lambda_rec / static_cast<double>(g_output.data.size());
  for (size_t i = 0; i < g.data.size(); ++i) {
    const double d = static_cast<double>(g_output.data[i]) - target_hr.data[i];
    g.data[i] = d > 0 ? static_cast<T>(scale) : (d < 0 ? static_cast<T>(-scale) : T(0));
  }
  return g;
}

}  // namespace wildgan
