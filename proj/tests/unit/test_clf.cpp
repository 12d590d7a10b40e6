#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "airink/clf.hpp"
#include "airink/error.hpp"
#include "image_sets.hpp"

using namespace airink;

namespace {

ClfConfig fast_config() {
  ClfConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 40;
  cfg.patience = 40;
  return cfg;
}

}  // namespace

TEST_CASE("classifier defaults") {
  const ClfConfig cfg;
  CHECK(cfg.train_fraction == 0.35);
  CHECK(cfg.validation_fraction == 0.15);
  CHECK(cfg.folds == 5);
  CHECK(cfg.batch_size == 5);
  CHECK(cfg.learning_rate == 2e-5);
  CHECK(cfg.momentum == 0.9);
  CHECK(cfg.nesterov);
  CHECK(cfg.max_epochs == 10000);
  CHECK(cfg.patience == 50);
  CHECK(cfg.validation_share() == doctest::Approx(0.3));
  CHECK(ClfConfig::from_map(cfg.to_map()).to_map() == cfg.to_map());
  CHECK_THROWS_AS(ClfConfig::from_map({{"folds", "-1"}}), ParseError);
  ClfConfig bad;
  bad.folds = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = {};
  bad.train_fraction = 0.9;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("a separable set is fit perfectly") {
  const auto set = imageset::halves(8, 3);
  const auto trained = train_classifier(set, {}, fast_config(), 11, imageset::cheap_arch());
  CHECK(accuracy_percent(trained.model, set) == 100.0);
  CHECK(trained.train_loss.back() < trained.train_loss.front());
}

TEST_CASE("returned weights come from the validation minimum") {
  const auto pool = imageset::halves(10, 4, 0.8);
  auto cfg = fast_config();
  cfg.max_epochs = 30;
  cfg.patience = 5;
  const auto [train, val] = split_for_validation(pool, cfg, 1);
  const auto t = train_classifier(train, val, cfg, 2, imageset::cheap_arch());
  const auto& v = t.validation_loss;
  REQUIRE(v.size() == t.epochs_run + 1);
  const auto argmin = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  CHECK(t.best_epoch == argmin);
  CHECK(t.epochs_run == std::min(cfg.max_epochs, t.best_epoch + cfg.patience));

  // The kept weights reproduce the recorded validation loss.
  std::vector<const GrayImage*> ptrs;
  std::vector<double> targets;
  for (const auto& li : val) {
    ptrs.push_back(&li.image);
    targets.push_back(target_of(li.label));
  }
  const double kept = t.model.loss(image_batch(std::span<const GrayImage* const>(ptrs)), targets);
  CHECK(kept == doctest::Approx(v[t.best_epoch]).epsilon(1e-12));

  const auto again = train_classifier(train, val, cfg, 2, imageset::cheap_arch());
  CHECK(again.model.parameters() == t.model.parameters());
  CHECK(again.validation_loss == t.validation_loss);
}

TEST_CASE("validation split sizes") {
  const auto pool = imageset::halves(10, 5);
  const ClfConfig cfg;
  const auto [train, val] = split_for_validation(pool, cfg, 3);
  CHECK(val.size() == 6);
  CHECK(train.size() == 14);
}

TEST_CASE("training needs both classes") {
  auto set = imageset::halves(3, 6);
  std::erase_if(set, [](const LabeledImage& li) { return li.label == Label::ad; });
  CHECK_THROWS_AS(train_classifier(set, {}, fast_config(), 1, imageset::cheap_arch()), LabelError);
}

TEST_CASE("a constant classifier scores 50 on a balanced set") {
  Cnn model(1, imageset::cheap_arch());
  model.parameters().at("fc1.w").fill(0.0);
  model.parameters().at("fc1.b").fill(0.0);
  const auto set = imageset::halves(5, 7);
  CHECK(accuracy_percent(model, set) == 50.0);
  CHECK_THROWS_AS(accuracy_percent(model, std::vector<LabeledImage>{}), InvalidArgument);
}
