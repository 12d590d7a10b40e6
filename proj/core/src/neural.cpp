#include "airink/neural.hpp"

#include <algorithm>
#include <cmath>

#include "airink/error.hpp"

namespace airink {

Tensor glorot_init(const Shape& shape, std::uint64_t seed) {
  if (shape.size() < 2 || shape_size(shape) == 0) {
    throw InvalidShape("glorot_init needs a non-empty shape of rank >= 2, got " +
                       shape_string(shape));
  }
  std::size_t receptive = 1;
  for (std::size_t i = 2; i < shape.size(); ++i) receptive *= shape[i];
  const double fan_out = static_cast<double>(shape[0] * receptive);
  const double fan_in = static_cast<double>(shape[1] * receptive);
  const double stddev = std::sqrt(2.0 / (fan_in + fan_out));

  Tensor t(shape);
  RandomStream rng(seed);
  for (auto& v : t.data()) v = rng.normal(0.0, stddev);
  return t;
}

Tensor bias_init(std::size_t n) { return Tensor(Shape{n}); }

OptimState OptimState::for_parameters(const ParameterSet& params, double learning_rate,
                                      double momentum, bool nesterov) {
  OptimState s;
  s.learning_rate = learning_rate;
  s.momentum = momentum;
  s.nesterov = nesterov;
  for (const auto& p : params.tensors()) s.velocity.push_back(zeros_like(p));
  return s;
}

void sgd_step(std::span<Tensor> params, std::span<const Tensor> grads, OptimState& state) {
  if (params.size() != grads.size() || params.size() != state.velocity.size()) {
    throw ShapeError("sgd_step: parameter, gradient and velocity counts differ");
  }
  const double lr = state.learning_rate;
  const double m = state.momentum;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    const auto& g = grads[i];
    auto& v = state.velocity[i];
    if (p.shape() != g.shape() || p.shape() != v.shape()) {
      throw ShapeError("sgd_step: shape mismatch at parameter " + std::to_string(i) + ": " +
                       shape_string(p.shape()) + " vs " + shape_string(g.shape()));
    }
    auto pv = p.vector();
    auto gv = g.vector();
    auto vv = v.vector();
    vv = m * vv - lr * gv;
    if (state.nesterov) {
      pv += m * vv - lr * gv;
    } else {
      pv += vv;
    }
  }
}

double clip_global_norm(ParameterSet& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads.tensors()) sq += g.vector().squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& g : grads.tensors()) g.vector() *= scale;
  }
  return norm;
}

void dropout_mask(std::span<double> mask, double keep_probability, RandomStream& rng) {
  if (!(keep_probability > 0.0) || keep_probability > 1.0) {
    throw InvalidArgument("dropout keep probability must lie in (0, 1]");
  }
  if (keep_probability == 1.0) {
    std::fill(mask.begin(), mask.end(), 1.0);
    return;
  }
  const double scale = 1.0 / keep_probability;
  for (auto& m : mask) m = rng.uniform() < keep_probability ? scale : 0.0;
}

Tensor dropout(const Tensor& t, double keep_probability, std::uint64_t seed, bool training) {
  if (!(keep_probability > 0.0) || keep_probability > 1.0) {
    throw InvalidArgument("dropout keep probability must lie in (0, 1]");
  }
  if (!training || keep_probability == 1.0) return t;
  Tensor out = t;
  std::vector<double> mask(t.size());
  RandomStream rng(seed);
  dropout_mask(mask, keep_probability, rng);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

double grad_check(const ValueAndGradient& f, std::span<const double> point, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("grad_check eps must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> analytic(x.size(), 0.0);
  const double f0 = f(x, analytic);
  if (!std::isfinite(f0)) throw NumericalError("grad_check: f is not finite at the point");

  double worst = 0.0;
  std::span<double> no_grad;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double fp = f(x, no_grad);
    x[i] = saved - eps;
    const double fm = f(x, no_grad);
    x[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericalError("grad_check: f is not finite at probe " + std::to_string(i));
    }
    const double numeric = (fp - fm) / (2.0 * eps);
    const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace airink
