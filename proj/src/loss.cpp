#include "shoesplat/loss.hpp"

#include <cmath>
#include <vector>

namespace shoesplat::train {

namespace {

std::vector<double> gaussian_kernel(int window, double sigma) {
  std::vector<double> k(window);
  const int half = window / 2;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - half;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Single-channel plane, row-major.
struct Plane {
  int w = 0, h = 0;
  std::vector<double> v;
  Plane(int w_, int h_) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_, 0.0) {}
  double& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

// Separable "same" filter with zero padding. The kernel is symmetric, so this
// is also its own adjoint.
Plane filter(const Plane& in, const std::vector<double>& k) {
  const int half = static_cast<int>(k.size()) / 2;
  Plane tmp(in.w, in.h), out(in.w, in.h);
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < in.w; ++x) {
      double s = 0.0;
      for (int i = 0; i < static_cast<int>(k.size()); ++i) {
        const int xx = x + i - half;
        if (xx >= 0 && xx < in.w) s += k[i] * in.at(xx, y);
      }
      tmp.at(x, y) = s;
    }
  }
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < in.w; ++x) {
      double s = 0.0;
      for (int i = 0; i < static_cast<int>(k.size()); ++i) {
        const int yy = y + i - half;
        if (yy >= 0 && yy < in.h) s += k[i] * tmp.at(x, yy);
      }
      out.at(x, y) = s;
    }
  }
  return out;
}

Plane channel(const ImageF& img, int c) {
  Plane p(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) p.at(x, y) = img.at(x, y, c);
  }
  return p;
}

double ssim_impl(const ImageF& a, const ImageF& b, ImageF* grad, const SsimOptions& o) {
  if (!a.same_shape(b)) fail(ErrorKind::DimensionMismatch, "ssim inputs differ in shape");
  if (o.window <= 0 || o.window % 2 == 0) fail(ErrorKind::InvalidArgument, "ssim window must be odd");
  const auto k = gaussian_kernel(o.window, o.sigma);
  const double n = static_cast<double>(a.size());
  if (grad) *grad = ImageF(a.width(), a.height(), a.channels());
  if (a.empty()) return 1.0;

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const Plane pa = channel(a, c), pb = channel(b, c);
    Plane aa(pa.w, pa.h), bb(pa.w, pa.h), ab(pa.w, pa.h);
    for (size_t i = 0; i < pa.v.size(); ++i) {
      aa.v[i] = pa.v[i] * pa.v[i];
      bb.v[i] = pb.v[i] * pb.v[i];
      ab.v[i] = pa.v[i] * pb.v[i];
    }
    const Plane mu_a = filter(pa, k), mu_b = filter(pb, k);
    const Plane m_aa = filter(aa, k), m_bb = filter(bb, k), m_ab = filter(ab, k);

    Plane d_mu(pa.w, pa.h), d_aa(pa.w, pa.h), d_ab(pa.w, pa.h);
    for (size_t i = 0; i < pa.v.size(); ++i) {
      const double ma = mu_a.v[i], mb = mu_b.v[i];
      const double var_a = m_aa.v[i] - ma * ma;
      const double var_b = m_bb.v[i] - mb * mb;
      const double cov = m_ab.v[i] - ma * mb;
      const double a1 = 2.0 * ma * mb + o.c1, a2 = 2.0 * cov + o.c2;
      const double b1 = ma * ma + mb * mb + o.c1, b2 = var_a + var_b + o.c2;
      const double s = (a1 * a2) / (b1 * b2);
      total += s;
      if (!grad) continue;
      const double ds_dvar = -s / b2;
      const double ds_dcov = 2.0 * a1 / (b1 * b2);
      const double ds_dmu = (2.0 * mb / b1 - a1 * 2.0 * ma / (b1 * b1)) * a2 / b2 +
                            ds_dvar * (-2.0 * ma) + ds_dcov * (-mb);
      d_mu.v[i] = ds_dmu;
      d_aa.v[i] = ds_dvar;
      d_ab.v[i] = ds_dcov;
    }
    if (!grad) continue;
    const Plane g_mu = filter(d_mu, k), g_aa = filter(d_aa, k), g_ab = filter(d_ab, k);
    for (int y = 0; y < pa.h; ++y) {
      for (int x = 0; x < pa.w; ++x) {
        const double g = g_mu.at(x, y) + 2.0 * pa.at(x, y) * g_aa.at(x, y) + pb.at(x, y) * g_ab.at(x, y);
        grad->at(x, y, c) = g / n;
      }
    }
  }
  return total / n;
}

}  // namespace

double ssim(const ImageF& a, const ImageF& b, const SsimOptions& options) {
  return ssim_impl(a, b, nullptr, options);
}

double ssim_with_grad(const ImageF& a, const ImageF& b, ImageF& grad_a, const SsimOptions& options) {
  return ssim_impl(a, b, &grad_a, options);
}

LossResult photometric_loss(const ImageF& rendered, const ImageF& target, double lambda) {
  if (!rendered.same_shape(target)) {
    fail(ErrorKind::DimensionMismatch, "rendered and target images differ in shape");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorKind::InvalidArgument, "lambda must be in [0, 1]");
  LossResult r;
  const double n = static_cast<double>(rendered.size());
  ImageF ssim_grad;
  r.ssim = lambda > 0.0 ? ssim_with_grad(rendered, target, ssim_grad) : ssim(rendered, target);
  r.grad = ImageF(rendered.width(), rendered.height(), rendered.channels());
  double l1 = 0.0;
  const auto& rv = rendered.data();
  const auto& tv = target.data();
  auto& gv = r.grad.data();
  for (size_t i = 0; i < rv.size(); ++i) {
    const double d = rv[i] - tv[i];
    l1 += std::abs(d);
    const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    gv[i] = (1.0 - lambda) * sign / n;
    if (lambda > 0.0) gv[i] -= lambda * ssim_grad.data()[i];
  }
  r.l1 = n > 0 ? l1 / n : 0.0;
  r.loss = (1.0 - lambda) * r.l1 + lambda * (1.0 - r.ssim);
  return r;
}

}  // namespace shoesplat::train
