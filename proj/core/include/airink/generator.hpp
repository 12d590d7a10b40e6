#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "airink/ink.hpp"
#include "airink/mdn.hpp"
#include "airink/rng.hpp"
#include "airink/tensor.hpp"

namespace airink {

struct GeneratorConfig {
  std::size_t hidden_size = 256;
  std::size_t layers = 2;
  std::size_t sequence_length = 150;  // SL
  std::size_t epochs = 301;
  double learning_rate = 0.01;
  std::size_t mixtures = 20;  // M
  double dropout_keep = 0.8;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;

  // Optimiser details left open by the reference hyperparameters.
  std::size_t batch_size = 8;
  double momentum = 0.9;
  bool nesterov = true;
  double grad_clip = 10.0;

  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static GeneratorConfig from_map(const std::map<std::string, std::string>& kv);
};

struct GeneratorCurves {
  /// Entry 0 is measured before the first update; entry e after epoch e.
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
};

/// Stacked-LSTM mixture density network over (a_x, a_y) for a single class.
class GeneratorModel {
 public:
  GeneratorModel(const GeneratorConfig& config, Label class_label);
  GeneratorModel(const GeneratorConfig& config, Label class_label, ParameterSet parameters);

  const GeneratorConfig& config() const noexcept { return config_; }
  Label class_label() const noexcept { return label_; }
  ParameterSet& parameters() noexcept { return params_; }
  const ParameterSet& parameters() const noexcept { return params_; }
  const GeneratorCurves& curves() const noexcept { return curves_; }
  GeneratorCurves& curves() noexcept { return curves_; }

  /// Teacher-forced mean next-point NLL over equal-length windows. With
  /// `grads` the gradient of that mean is accumulated into it; with
  /// `dropout_rng` dropout is applied between LSTM layers.
  double sequence_loss(std::span<const AccelSeries> windows, ParameterSet* grads = nullptr,
                       RandomStream* dropout_rng = nullptr) const;

  /// Autoregressive sampling of sequence_length points per seed, starting
  /// from a (0, 0) input and zero state. Each seed drives its own stream.
  std::vector<AccelSeries> sample(std::span<const std::uint64_t> seeds) const;

  /// Mixture predicted for the first step (zero input, zero state).
  MixtureParams initial_mixture() const;

 private:
  GeneratorConfig config_;
  Label label_;
  ParameterSet params_;
  GeneratorCurves curves_;
};

/// Cuts each series into non-overlapping windows of `length` points; tails
/// and shorter series are dropped.
std::vector<AccelSeries> make_windows(std::span<const AccelSeries> series, std::size_t length);

/// Splits the class's series 70/30 (by default), windows them and trains by
/// teacher forcing for config.epochs epochs. Returns the final-epoch model.
GeneratorModel train_generator(std::span<const AccelSeries> series, const GeneratorConfig& config);

AccelSeries sample_sequence(const GeneratorModel& model, std::uint64_t seed);

/// Writes the checkpoint and a `<path>.meta.json` sidecar holding class,
/// configuration, seed and any extra context (scenario, task, ...).
void save_generator(const GeneratorModel& model, const std::filesystem::path& path,
                    const std::map<std::string, std::string>& context = {});
GeneratorModel load_generator(const std::filesystem::path& path);

}  // namespace airink
