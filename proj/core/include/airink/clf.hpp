#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "airink/cnn.hpp"
#include "airink/imaging.hpp"
#include "airink/ink.hpp"

namespace airink {

/// CNN training regime. Defaults are the reference experimental setup.
struct ClfConfig {
  double train_fraction = 0.35;
  double validation_fraction = 0.15;
  std::size_t folds = 5;
  std::size_t batch_size = 5;
  double learning_rate = 2e-5;
  double momentum = 0.9;
  bool nesterov = true;
  std::size_t max_epochs = 10000;
  /// Epochs without a new validation minimum before training stops.
  std::size_t patience = 50;

  /// Share of a training pool held out for validation:
  /// validation / (train + validation).
  double validation_share() const { return validation_fraction / (train_fraction + validation_fraction); }

  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static ClfConfig from_map(const std::map<std::string, std::string>& kv);
};

struct LabeledImage {
  GrayImage image;
  Label label = Label::healthy;
};

inline double target_of(Label label) { return label == Label::ad ? 1.0 : 0.0; }

struct TrainedClassifier {
  Cnn model;
  /// Entry 0 is measured on the initial weights; entry e after epoch e.
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
};

/// Mini-batch SGD on binary cross entropy. Returns the weights of the epoch
/// with the lowest validation loss (training loss when no validation images
/// are given), stopping at max_epochs or after `patience` epochs without a
/// new minimum.
TrainedClassifier train_classifier(std::span<const LabeledImage> train,
                                   std::span<const LabeledImage> validation,
                                   const ClfConfig& config, std::uint64_t seed,
                                   const CnnArch& arch = {});

/// Splits a pool into (train, validation) with the config's validation share.
std::pair<std::vector<LabeledImage>, std::vector<LabeledImage>> split_for_validation(
    std::span<const LabeledImage> pool, const ClfConfig& config, std::uint64_t seed);

/// Percentage of images whose thresholded prediction (p >= 0.5 means AD)
/// matches the label.
double accuracy_percent(const Cnn& model, std::span<const LabeledImage> images);

}  // namespace airink
