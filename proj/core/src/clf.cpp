#include "airink/clf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "airink/error.hpp"
#include "airink/neural.hpp"
#include "airink/rng.hpp"
#include "text.hpp"

namespace airink {

void ClfConfig::validate() const {
  if (!(train_fraction > 0.0) || !(validation_fraction >= 0.0) ||
      train_fraction + validation_fraction > 1.0) {
    throw InvalidArgument("classifier train/validation fractions must be positive and sum to <= 1");
  }
  if (folds < 1) throw InvalidArgument("classifier folds (repetitions) must be >= 1");
  if (batch_size == 0 || max_epochs == 0 || patience == 0) {
    throw InvalidArgument("classifier batch size, max epochs and patience must be positive");
  }
  if (!(learning_rate > 0.0)) throw InvalidArgument("classifier learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidArgument("classifier momentum must lie in [0, 1)");
  }
}

std::map<std::string, std::string> ClfConfig::to_map() const {
  using text::format_double;
  return {{"train_fraction", format_double(train_fraction)},
          {"validation_fraction", format_double(validation_fraction)},
          {"folds", std::to_string(folds)},
          {"batch_size", std::to_string(batch_size)},
          {"learning_rate", format_double(learning_rate)},
          {"momentum", format_double(momentum)},
          {"nesterov", nesterov ? "true" : "false"},
          {"max_epochs", std::to_string(max_epochs)},
          {"patience", std::to_string(patience)}};
}

ClfConfig ClfConfig::from_map(const std::map<std::string, std::string>& kv) {
  ClfConfig c;
  for (const auto& [key, value] : kv) {
    bool ok = true;
    std::uint64_t u = 0;
    if (key == "train_fraction") ok = text::parse_double(value, c.train_fraction);
    else if (key == "validation_fraction") ok = text::parse_double(value, c.validation_fraction);
    else if (key == "learning_rate") ok = text::parse_double(value, c.learning_rate);
    else if (key == "momentum") ok = text::parse_double(value, c.momentum);
    else if (key == "nesterov") ok = text::parse_bool(value, c.nesterov);
    else if (key == "folds" && (ok = text::parse_u64(value, u))) c.folds = u;
    else if (key == "batch_size" && (ok = text::parse_u64(value, u))) c.batch_size = u;
    else if (key == "max_epochs" && (ok = text::parse_u64(value, u))) c.max_epochs = u;
    else if (key == "patience" && (ok = text::parse_u64(value, u))) c.patience = u;
    if (!ok) throw ParseError("bad classifier setting " + key + " = " + value);
  }
  return c;
}

namespace {

bool has_both_classes(std::span<const LabeledImage> images) {
  bool ad = false;
  bool healthy = false;
  for (const auto& im : images) (im.label == Label::ad ? ad : healthy) = true;
  return ad && healthy;
}

double mean_loss(const Cnn& model, std::span<const LabeledImage> images) {
  constexpr std::size_t kChunk = 16;
  double total = 0.0;
  std::vector<const GrayImage*> ptrs;
  std::vector<double> targets;
  for (std::size_t start = 0; start < images.size(); start += kChunk) {
    const auto n = std::min(kChunk, images.size() - start);
    ptrs.clear();
    targets.clear();
    for (std::size_t i = start; i < start + n; ++i) {
      ptrs.push_back(&images[i].image);
      targets.push_back(target_of(images[i].label));
    }
    total += model.loss(image_batch(std::span<const GrayImage* const>(ptrs)), targets) *
             static_cast<double>(n);
  }
  return total / static_cast<double>(images.size());
}

}  // namespace

TrainedClassifier train_classifier(std::span<const LabeledImage> train,
                                   std::span<const LabeledImage> validation,
                                   const ClfConfig& config, std::uint64_t seed,
                                   const CnnArch& arch) {
  config.validate();
  if (!has_both_classes(train)) throw LabelError("classifier training data holds a single class");

  TrainedClassifier out{Cnn(derive_seed(seed, "clf/init"), arch), {}, {}, 0, 0};
  Cnn& model = out.model;
  auto grads = model.parameters().zeros_like();
  auto state = OptimState::for_parameters(model.parameters(), config.learning_rate,
                                          config.momentum, config.nesterov);
  RandomStream shuffle_rng(seed, "clf/shuffle");

  const bool use_validation = !validation.empty();
  auto monitored = [&]() {
    return use_validation ? out.validation_loss.back() : out.train_loss.back();
  };
  // Without validation data the selection criterion is the full training
  // loss; otherwise the curve holds the running mean of the epoch's batches.
  auto record = [&](std::size_t epoch, double running_train_loss) {
    out.train_loss.push_back(use_validation && epoch > 0 ? running_train_loss
                                                         : mean_loss(model, train));
    out.validation_loss.push_back(use_validation ? mean_loss(model, validation) : std::nan(""));
    if (!std::isfinite(out.train_loss.back()) || !std::isfinite(monitored())) {
      throw DivergedTraining("classifier loss became non-finite at epoch " + std::to_string(epoch));
    }
  };

  record(0, 0.0);
  double best = monitored();
  ParameterSet best_params = model.parameters();

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<const GrayImage*> ptrs;
  std::vector<double> targets;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      ptrs.clear();
      targets.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + config.batch_size); ++k) {
        ptrs.push_back(&train[order[k]].image);
        targets.push_back(target_of(train[order[k]].label));
      }
      grads.set_zero();
      const double loss =
          model.loss(image_batch(std::span<const GrayImage* const>(ptrs)), targets, &grads);
      if (!std::isfinite(loss)) {
        throw DivergedTraining("classifier loss became non-finite at epoch " +
                               std::to_string(epoch));
      }
      epoch_loss += loss * static_cast<double>(ptrs.size());
      sgd_step(model.parameters(), grads, state);
    }
    record(epoch, epoch_loss / static_cast<double>(order.size()));
    out.epochs_run = epoch;
    if (monitored() < best) {
      best = monitored();
      out.best_epoch = epoch;
      best_params = model.parameters();
    } else if (epoch - out.best_epoch >= config.patience) {
      break;
    }
  }
  model.parameters() = std::move(best_params);
  return out;
}

std::pair<std::vector<LabeledImage>, std::vector<LabeledImage>> split_for_validation(
    std::span<const LabeledImage> pool, const ClfConfig& config, std::uint64_t seed) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomStream rng(seed, "clf/validation-split");
  shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::lround(config.validation_share() * static_cast<double>(pool.size())));
  std::pair<std::vector<LabeledImage>, std::vector<LabeledImage>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_val ? out.second : out.first).push_back(pool[order[i]]);
  }
  return out;
}

double accuracy_percent(const Cnn& model, std::span<const LabeledImage> images) {
  if (images.empty()) throw InvalidArgument("accuracy of an empty image set");
  std::size_t correct = 0;
  for (const auto& im : images) {
    const Label predicted = model.probability(im.image) >= 0.5 ? Label::ad : Label::healthy;
    if (predicted == im.label) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(images.size());
}

}  // namespace airink
