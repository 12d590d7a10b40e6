#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "airink/imaging.hpp"
#include "airink/layers.hpp"
#include "airink/tensor.hpp"

namespace airink {

/// Five 3x3 same-padded ReLU convolutions with 2x2 max pooling after the
/// second and fourth, then dense(ReLU) and a single sigmoid output.
struct CnnArch {
  int input_side = kImageSide;
  std::array<int, 5> filters = {32, 32, 64, 64, 128};
  int dense_units = 256;

  friend bool operator==(const CnnArch&, const CnnArch&) = default;
};

/// Binary image classifier; the output is P(class = AD).
class Cnn {
 public:
  explicit Cnn(std::uint64_t seed, const CnnArch& arch = {});
  Cnn(const CnnArch& arch, ParameterSet parameters);

  const CnnArch& arch() const noexcept { return arch_; }
  ParameterSet& parameters() noexcept { return params_; }
  const ParameterSet& parameters() const noexcept { return params_; }

  /// Pre-sigmoid outputs, one per column of `images` (input_side^2 rows).
  ops::Matrix logits(const ops::Matrix& images) const;

  /// Mean binary cross entropy against 0/1 targets (1 = AD); accumulates the
  /// gradient into `grads` when given.
  double loss(const ops::Matrix& images, const std::vector<double>& targets,
              ParameterSet* grads = nullptr) const;

  double probability(const GrayImage& image) const;
  std::vector<double> probabilities(std::span<const GrayImage> images) const;

 private:
  CnnArch arch_;
  ParameterSet params_;
};

/// Packs images as columns of a matrix.
ops::Matrix image_batch(std::span<const GrayImage> images);
ops::Matrix image_batch(std::span<const GrayImage* const> images);

}  // namespace airink
