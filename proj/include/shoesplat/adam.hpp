#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace shoesplat::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-15;
};

/// Moments for one parameter group. `step` counts completed updates.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamState(size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
  size_t size() const { return m.size(); }
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, const AdamConfig& config = {});

}  // namespace shoesplat::train
