#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "shoesplat/gaussian.hpp"

namespace shoesplat::gs {

/// Binary little-endian PLY in the common splat interchange layout: per
/// vertex x y z nx ny nz f_dc_0..2 f_rest_* opacity scale_0..2 rot_0..3, all
/// float32. Opacity is stored as a logit and scales as logs. f_rest is
/// channel-major (all red terms, then green, then blue), and its count fixes
/// the SH degree. Values are rounded to float32.
std::string save_cloud(const GaussianCloud& cloud);
void save_cloud(const GaussianCloud& cloud, const std::filesystem::path& path);

/// Throws FormatError when a required property is missing or the f_rest count
/// does not correspond to an SH degree in [0, 3].
GaussianCloud load_cloud(std::string_view bytes);
GaussianCloud load_cloud(const std::filesystem::path& path);

}  // namespace shoesplat::gs
