#include "airink/mdn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "airink/error.hpp"

namespace airink {
namespace {

const double kLogTwoPi = std::log(2.0 * std::numbers::pi);

std::size_t components_of(std::span<const double> raw) {
  if (raw.empty() || raw.size() % 6 != 0) {
    throw ShapeError("mixture head output must hold 6*M values, got " +
                     std::to_string(raw.size()));
  }
  return raw.size() / 6;
}

double clamp_rho(double r) { return std::clamp(r, -kRhoLimit, kRhoLimit); }

}  // namespace

MixtureParams mdn_params(std::span<const double> raw) {
  const auto m = components_of(raw);
  MixtureParams p;
  p.weight.resize(m);
  const auto block = [&](std::size_t b) { return raw.subspan(b * m, m); };

  const auto pi_hat = block(0);
  const double top = *std::max_element(pi_hat.begin(), pi_hat.end());
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) total += (p.weight[k] = std::exp(pi_hat[k] - top));
  for (auto& w : p.weight) w /= total;

  p.mean_x.assign(block(1).begin(), block(1).end());
  p.mean_y.assign(block(2).begin(), block(2).end());
  for (double v : block(3)) p.sigma_x.push_back(std::exp(v));
  for (double v : block(4)) p.sigma_y.push_back(std::exp(v));
  for (double v : block(5)) p.rho.push_back(clamp_rho(std::tanh(v)));
  return p;
}

double bivariate_log_density(double x, double y, double mean_x, double mean_y, double sigma_x,
                             double sigma_y, double rho) {
  const double u = (x - mean_x) / sigma_x;
  const double v = (y - mean_y) / sigma_y;
  const double one_minus = 1.0 - rho * rho;
  const double z = u * u + v * v - 2.0 * rho * u * v;
  return -kLogTwoPi - std::log(sigma_x) - std::log(sigma_y) - 0.5 * std::log(one_minus) -
         z / (2.0 * one_minus);
}

double mdn_nll(const MixtureParams& p, double target_x, double target_y) {
  const auto m = p.components();
  if (m == 0) throw ShapeError("mixture has no components");
  std::vector<double> terms(m);
  for (std::size_t k = 0; k < m; ++k) {
    terms[k] = std::log(p.weight[k]) + bivariate_log_density(target_x, target_y, p.mean_x[k],
                                                             p.mean_y[k], p.sigma_x[k],
                                                             p.sigma_y[k], p.rho[k]);
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  const double loss = -(top + std::log(acc));
  if (!std::isfinite(loss)) throw NumericalError("mixture likelihood is not finite");
  return loss;
}

double mdn_nll_raw(std::span<const double> raw, double tx, double ty, std::span<double> grad) {
  const auto m = components_of(raw);
  if (!grad.empty() && grad.size() != raw.size()) {
    throw ShapeError("mdn_nll_raw: gradient buffer length mismatch");
  }
  const auto pi_hat = raw.subspan(0, m);
  const double pi_top = *std::max_element(pi_hat.begin(), pi_hat.end());
  double pi_sum = 0.0;
  for (double v : pi_hat) pi_sum += std::exp(v - pi_top);
  const double log_pi_norm = pi_top + std::log(pi_sum);

  // Per-component pieces reused by the gradient.
  thread_local std::vector<double> log_joint, u, v, rho, one_minus, z;
  log_joint.resize(m);
  u.resize(m);
  v.resize(m);
  rho.resize(m);
  one_minus.resize(m);
  z.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double sx = std::exp(raw[3 * m + k]);
    const double sy = std::exp(raw[4 * m + k]);
    rho[k] = clamp_rho(std::tanh(raw[5 * m + k]));
    u[k] = (tx - raw[m + k]) / sx;
    v[k] = (ty - raw[2 * m + k]) / sy;
    one_minus[k] = 1.0 - rho[k] * rho[k];
    z[k] = u[k] * u[k] + v[k] * v[k] - 2.0 * rho[k] * u[k] * v[k];
    const double log_n = -kLogTwoPi - raw[3 * m + k] - raw[4 * m + k] -
                         0.5 * std::log(one_minus[k]) - z[k] / (2.0 * one_minus[k]);
    log_joint[k] = (pi_hat[k] - log_pi_norm) + log_n;
  }
  const double top = *std::max_element(log_joint.begin(), log_joint.end());
  double acc = 0.0;
  for (double t : log_joint) acc += std::exp(t - top);
  const double log_lik = top + std::log(acc);
  const double loss = -log_lik;
  if (!std::isfinite(loss)) throw NumericalError("mixture likelihood is not finite");

  if (!grad.empty()) {
    for (std::size_t k = 0; k < m; ++k) {
      const double gamma = std::exp(log_joint[k] - log_lik);  // responsibility
      const double pi = std::exp(pi_hat[k] - log_pi_norm);
      const double om = one_minus[k];
      const double sx = std::exp(raw[3 * m + k]);
      const double sy = std::exp(raw[4 * m + k]);
      grad[k] = pi - gamma;
      grad[m + k] = -gamma * (u[k] - rho[k] * v[k]) / (sx * om);
      grad[2 * m + k] = -gamma * (v[k] - rho[k] * u[k]) / (sy * om);
      grad[3 * m + k] = -gamma * (-1.0 + u[k] * (u[k] - rho[k] * v[k]) / om);
      grad[4 * m + k] = -gamma * (-1.0 + v[k] * (v[k] - rho[k] * u[k]) / om);
      const double t = std::tanh(raw[5 * m + k]);
      const double drho_dhat = std::abs(t) < kRhoLimit ? 1.0 - t * t : 0.0;
      const double dlogn_drho = rho[k] / om + u[k] * v[k] / om - rho[k] * z[k] / (om * om);
      grad[5 * m + k] = -gamma * dlogn_drho * drho_dhat;
    }
  }
  return loss;
}

MixtureDraw sample_mixture(const MixtureParams& p, RandomStream& rng) {
  const auto m = p.components();
  MixtureDraw draw;
  const double u = rng.uniform();
  double cumulative = 0.0;
  draw.component = m - 1;
  for (std::size_t k = 0; k < m; ++k) {
    cumulative += p.weight[k];
    if (u < cumulative) {
      draw.component = k;
      break;
    }
  }
  const auto k = draw.component;
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  draw.x = p.mean_x[k] + p.sigma_x[k] * z1;
  draw.y = p.mean_y[k] + p.sigma_y[k] * (p.rho[k] * z1 + std::sqrt(1.0 - p.rho[k] * p.rho[k]) * z2);
  return draw;
}

}  // namespace airink
