#include <doctest.h>

#include <cmath>

#include "airink/cnn.hpp"
#include "airink/error.hpp"
#include "airink/neural.hpp"
#include "gradcheck_util.hpp"
#include "image_sets.hpp"

using namespace airink;

TEST_CASE("every layer of a small CNN passes grad_check") {
  CnnArch arch;
  arch.input_side = 8;
  arch.filters = {2, 3, 2, 3, 2};
  arch.dense_units = 3;
  Cnn model(5, arch);
  // Random biases move activations off the ReLU kink at zero.
  RandomStream rng(6);
  for (std::size_t i = 0; i < model.parameters().size(); ++i) {
    if (model.parameters().name(i).ends_with(".b")) {
      for (auto& v : model.parameters()[i].data()) v = rng.normal(0, 0.1);
    }
  }
  const auto images = gradutil::random_matrix(64, 3, 7);
  const std::vector<double> targets{1.0, 0.0, 1.0};
  const ValueAndGradient f = [&](std::span<const double> p, std::span<double> g) {
    Cnn m = model;
    m.parameters().assign(p);
    if (g.empty()) return m.loss(images, targets);
    auto grads = m.parameters().zeros_like();
    const double loss = m.loss(images, targets, &grads);
    const auto flat = grads.flatten();
    std::copy(flat.begin(), flat.end(), g.begin());
    return loss;
  };
  CHECK(grad_check(f, model.parameters().flatten()) < 1e-4);
}

TEST_CASE("default architecture shapes") {
  const Cnn model(1);
  const auto& p = model.parameters();
  CHECK(p.at("conv0.w").shape() == Shape{32, 1, 3, 3});
  CHECK(p.at("conv4.w").shape() == Shape{128, 64, 3, 3});
  CHECK(p.at("fc0.w").shape() == Shape{256, 128 * 16 * 16});
  CHECK(p.at("fc1.w").shape() == Shape{1, 256});
  for (double v : p.at("fc0.b").values()) CHECK(v == 0.0);
  CHECK_THROWS_AS(Cnn(CnnArch{}, ParameterSet{}), ShapeError);
  CHECK_THROWS_AS(Cnn(1, CnnArch{10, {1, 1, 1, 1, 1}, 2}), InvalidShape);
}

TEST_CASE("probabilities lie strictly inside (0, 1) and agree across entry points") {
  const Cnn model(2, imageset::cheap_arch());
  const auto set = imageset::halves(3, 1);
  std::vector<GrayImage> images;
  for (const auto& li : set) images.push_back(li.image);
  const auto batch = model.probabilities(images);
  REQUIRE(batch.size() == images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double p = model.probability(images[i]);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(p == doctest::Approx(batch[i]).epsilon(1e-12));
  }
  CHECK(Cnn(2, imageset::cheap_arch()).parameters() == model.parameters());
  CHECK_THROWS_AS(model.logits(ops::Matrix::Zero(10, 1)), ShapeError);
}
