#include "shoesplat/adam.hpp"

#include <cmath>

#include "shoesplat/error.hpp"

namespace shoesplat::train {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.size()) {
    fail(ErrorKind::DimensionMismatch, "adam parameter, gradient and state sizes differ");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

}  // namespace shoesplat::train
