#pragma once

#include <string>

#include "shoesplat/geometry.hpp"
#include "shoesplat/image.hpp"

namespace shoesplat {

/// One posed image with its foreground mask.
struct View {
  std::string id;
  ImageF image;      // RGB in [0,1]
  MaskBuffer mask;   // same size as image
  geom::PinholeCamera camera;
};

/// image where mask >= 0.5, `background` elsewhere.
ImageF masked_target(const View& view, const Rgb& background = {0.0, 0.0, 0.0});

}  // namespace shoesplat
