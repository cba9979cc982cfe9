#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wildgan/losses.hpp"
#include "wildgan/models.hpp"

using namespace wildgan;

TEST_CASE("discriminator_loss values") {
  // symmetry point: both heads at 0.5
  std::vector<float> half{0.5f, 0.5f};
  CHECK(discriminator_loss(half, half) == doctest::Approx(2 * std::log(2)).epsilon(1e-12));

  // perfect discriminator under clamping: loss -> ~0
  std::vector<float> ones{1.0f}, zeros{0.0f};
  CHECK(discriminator_loss(ones, zeros) < 1e-5);

  // direct evaluation: -ln 0.8 - ln 0.7
  std::vector<float> r{0.8f}, f{0.3f};
  CHECK(discriminator_loss(r, f) ==
        doctest::Approx(-std::log(0.8) - std::log(0.7)).epsilon(1e-6));

  CHECK_THROWS_AS(discriminator_loss(std::vector<float>{1.2f}, f), ValidationError);
  CHECK_THROWS_AS(discriminator_loss(std::vector<float>{}, f), ValidationError);
}

TEST_CASE("gan_value is the exact negation of discriminator_loss") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> r(5), f(7);
    for (auto& v : r) v = static_cast<float>(rng.uniform(0.01, 0.99));
    for (auto& v : f) v = static_cast<float>(rng.uniform(0.01, 0.99));
    CHECK(gan_value(r, f) == -discriminator_loss(r, f));  // bitwise identity
  }
  // equilibrium: all confidences 0.5 -> -2 ln 2 within 1e-9
  std::vector<float> half(72, 0.5f);
  CHECK(std::abs(gan_value(half, half) - (-2.0 * std::log(2.0))) < 1e-9);
}

TEST_CASE("generator_loss both variants") {
  std::vector<float> half{0.5f};
  CHECK(generator_loss(half, GenLossVariant::saturating) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-9));
  CHECK(generator_loss(half, GenLossVariant::non_saturating) ==
        doctest::Approx(-std::log(0.5)).epsilon(1e-9));
  std::vector<float> point9{0.9f};
  CHECK(generator_loss(point9, GenLossVariant::non_saturating) ==
        doctest::Approx(-std::log(0.9)).epsilon(1e-6));
  // both decrease as d_fake -> 1
  std::vector<float> lo{0.3f}, hi{0.7f};
  for (auto v : {GenLossVariant::saturating, GenLossVariant::non_saturating})
    CHECK(generator_loss(hi, v) < generator_loss(lo, v));
}

TEST_CASE("enhancement_loss composition") {
  Tensor<float> a({1, 3, 2, 2}), b({1, 3, 2, 2});
  a.fill(0.2f);
  b.fill(0.2f);
  std::vector<float> df{0.5f};

  // identity reconstruction, no adversarial term
  CHECK(enhancement_loss(a, b, df, 1.0, 0.0) == doctest::Approx(0.0));

  // lambda_rec = 0 reduces exactly to generator_loss
  CHECK(enhancement_loss(a, b, df, 0.0, 1.0) ==
        doctest::Approx(generator_loss(df, GenLossVariant::non_saturating)));

  // constant offset 0.1 -> MAE 0.1
  for (auto& v : a.data) v = 0.3f;
  CHECK(enhancement_loss(a, b, df, 1.0, 0.0) == doctest::Approx(0.1).epsilon(1e-6));

  Tensor<float> wrong({1, 3, 2, 3});
  CHECK_THROWS_AS(enhancement_loss(a, wrong, df, 1.0, 0.0), ShapeError);
}

TEST_CASE("sample_noise distribution and determinism") {
  Tensor<float> z = sample_noise<float>(1, 100, 42);
  REQUIRE(z.shape == std::vector<int>{1, 100});
  for (float v : z.data) CHECK((v >= 0.0f && v < 1.0f));

  Tensor<float> z2 = sample_noise<float>(1, 100, 42);
  CHECK(z.data == z2.data);  // bit-identical

  // law of large numbers: mean of 10000 uniforms within 0.02 of 0.5
  Tensor<float> big = sample_noise<float>(10000, 1, 7);
  double mean = 0;
  for (float v : big.data) mean += v;
  mean /= 10000.0;
  CHECK(std::abs(mean - 0.5) < 0.02);

  CHECK_THROWS_AS(sample_noise<float>(0, 10, 1), ValidationError);
  CHECK_THROWS_AS(sample_noise<float>(10, 0, 1), ValidationError);

  // gaussian sampler behind the config switch
  Tensor<float> g = sample_noise<float>(10000, 1, 7, NoiseDistribution::gaussian);
  double gm = 0;
  for (float v : g.data) gm += v;
  CHECK(std::abs(gm / 10000.0) < 0.05);
}
