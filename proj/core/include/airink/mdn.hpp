#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "airink/rng.hpp"

namespace airink {

/// Largest |rho| a mixture component may take.
inline constexpr double kRhoLimit = 1.0 - 1e-6;

/// Bivariate Gaussian mixture over (a_x, a_y).
struct MixtureParams {
  std::vector<double> weight;
  std::vector<double> mean_x;
  std::vector<double> mean_y;
  std::vector<double> sigma_x;
  std::vector<double> sigma_y;
  std::vector<double> rho;

  std::size_t components() const noexcept { return weight.size(); }
};

/// Raw head layout: six blocks of M values each, in the order
/// [pi_hat | mu_x | mu_y | sigma_hat_x | sigma_hat_y | rho_hat].
/// pi = softmax(pi_hat), sigma = exp(sigma_hat), rho = clamp(tanh(rho_hat)).
MixtureParams mdn_params(std::span<const double> raw);

/// -log sum_k pi_k N(target; mu_k, sigma_k, rho_k), via log-sum-exp.
double mdn_nll(const MixtureParams& params, double target_x, double target_y);

/// Same loss straight from the raw head output, with its gradient w.r.t. the
/// raw values written to `grad` when it is non-empty.
double mdn_nll_raw(std::span<const double> raw, double target_x, double target_y,
                   std::span<double> grad);

/// Log density of one bivariate component.
double bivariate_log_density(double x, double y, double mean_x, double mean_y, double sigma_x,
                             double sigma_y, double rho);

struct MixtureDraw {
  std::size_t component = 0;
  double x = 0.0;
  double y = 0.0;
};

/// Picks k ~ pi, then (x, y) ~ N(mu_k, sigma_k, rho_k).
MixtureDraw sample_mixture(const MixtureParams& params, RandomStream& rng);

}  // namespace airink
