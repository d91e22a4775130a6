#pragma once

#include "shoesplat/image.hpp"

namespace shoesplat::train {

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

struct SsimOptions {
  int window = kSsimWindow;
  double sigma = kSsimSigma;
  double c1 = kSsimC1;
  double c2 = kSsimC2;
};

/// Mean SSIM over all pixels and channels, using a normalised Gaussian window
/// with zero padding at the borders.
double ssim(const ImageF& a, const ImageF& b, const SsimOptions& options = {});

/// SSIM together with d ssim / d a.
double ssim_with_grad(const ImageF& a, const ImageF& b, ImageF& grad_a,
                      const SsimOptions& options = {});

struct LossResult {
  double loss = 0.0;
  double l1 = 0.0;
  double ssim = 1.0;
  ImageF grad;  // dLoss/dRendered
};

/// (1 - lambda) * mean |r - t| + lambda * (1 - ssim(r, t)).
LossResult photometric_loss(const ImageF& rendered, const ImageF& target, double lambda);

}  // namespace shoesplat::train
