#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "airink/rng.hpp"
#include "airink/tensor.hpp"

namespace airink {

/// Glorot (Xavier) normal initialisation: N(0, 2 / (fan_in + fan_out)).
///
/// Weight shapes follow the (outputs, inputs, receptive...) convention, so
/// fan_out = shape[0] * receptive and fan_in = shape[1] * receptive where
/// receptive is the product of any trailing dimensions.
Tensor glorot_init(const Shape& shape, std::uint64_t seed);

/// Bias initialiser: exactly zero.
Tensor bias_init(std::size_t n);

struct OptimState {
  double learning_rate = 0.01;
  double momentum = 0.0;
  bool nesterov = false;
  std::vector<Tensor> velocity;

  /// Zero velocity buffers shaped like `params`.
  static OptimState for_parameters(const ParameterSet& params, double learning_rate,
                                   double momentum, bool nesterov);
};

/// One SGD update.
///   v' = m v - lr g
///   plain:    p' = p + v'
///   nesterov: p' = p + m v' - lr g
void sgd_step(std::span<Tensor> params, std::span<const Tensor> grads, OptimState& state);
inline void sgd_step(ParameterSet& params, const ParameterSet& grads, OptimState& state) {
  sgd_step(params.tensors(), grads.tensors(), state);
}

/// Rescales `grads` in place when their global L2 norm exceeds `max_norm`.
/// Returns the norm before clipping.
double clip_global_norm(ParameterSet& grads, double max_norm);

/// Inverted dropout. In training mode each entry is zeroed with probability
/// 1 - keep and survivors are scaled by 1 / keep; otherwise identity.
Tensor dropout(const Tensor& t, double keep_probability, std::uint64_t seed, bool training);

/// Fills `mask` with 0 or 1/keep entries drawn from `rng`.
void dropout_mask(std::span<double> mask, double keep_probability, RandomStream& rng);

/// A scalar function that returns f(x) and, when `grad` is non-empty, writes
/// the reverse-mode gradient into it.
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Max over coordinates of |g_ad - g_fd| / max(1, |g_ad|, |g_fd|), where g_fd
/// is the central difference with step eps. Throws NumericalError when f is
/// not finite at a probe point.
double grad_check(const ValueAndGradient& f, std::span<const double> point, double eps = 1e-5);

}  // namespace airink
