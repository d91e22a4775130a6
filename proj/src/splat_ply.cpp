#include "shoesplat/splat_ply.hpp"

#include "shoesplat/ply.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat::gs {

std::string save_cloud(const GaussianCloud& cloud) {
  const size_t n = cloud.size();
  const int rest = sh_coeff_count(cloud.sh_degree) - 1;

  ply::Element vertex;
  vertex.name = "vertex";
  vertex.count = n;
  auto column = [&](std::string name, auto&& getter) {
    std::vector<double> values(n);
    for (size_t i = 0; i < n; ++i) values[i] = getter(cloud.gaussians[i]);
    vertex.properties.push_back(ply::scalar(std::move(name), ply::Type::Float32, std::move(values)));
  };

  const char* axes[] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) column(axes[k], [k](const Gaussian& g) { return g.mean[k]; });
  for (const char* name : {"nx", "ny", "nz"}) column(name, [](const Gaussian&) { return 0.0; });
  for (int c = 0; c < 3; ++c) {
    column("f_dc_" + std::to_string(c), [c](const Gaussian& g) { return g.sh_at(0, c); });
  }
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < rest; ++k) {
      column("f_rest_" + std::to_string(c * rest + k),
             [c, k](const Gaussian& g) { return g.sh_at(k + 1, c); });
    }
  }
  column("opacity", [](const Gaussian& g) { return g.opacity_logit; });
  for (int k = 0; k < 3; ++k) {
    column("scale_" + std::to_string(k), [k](const Gaussian& g) { return g.log_scale[k]; });
  }
  for (int k = 0; k < 4; ++k) {
    column("rot_" + std::to_string(k), [k](const Gaussian& g) { return g.rotation[k]; });
  }

  ply::File file;
  file.format = ply::Format::BinaryLittleEndian;
  file.elements.push_back(std::move(vertex));
  return ply::serialize(file);
}

void save_cloud(const GaussianCloud& cloud, const std::filesystem::path& path) {
  atomic_write_file(path, save_cloud(cloud));
}

GaussianCloud load_cloud(std::string_view bytes) {
  const ply::File file = ply::parse(bytes);
  const ply::Element* vertex = file.find("vertex");
  if (!vertex) fail(ErrorKind::FormatError, "splat file has no vertex element");

  auto require = [&](const std::string& name) -> const std::vector<double>& {
    const ply::Property* p = vertex->find(name);
    if (!p || p->is_list()) fail(ErrorKind::FormatError, "splat file is missing property " + name);
    return p->values;
  };

  int rest_total = 0;
  while (vertex->find("f_rest_" + std::to_string(rest_total))) ++rest_total;
  int degree = -1;
  for (int d = 0; d <= kMaxShDegree; ++d) {
    if (3 * (sh_coeff_count(d) - 1) == rest_total) degree = d;
  }
  if (degree < 0) {
    fail(ErrorKind::FormatError,
         "f_rest count " + std::to_string(rest_total) + " does not match an SH degree");
  }
  const int rest = sh_coeff_count(degree) - 1;

  GaussianCloud cloud;
  cloud.sh_degree = degree;
  cloud.gaussians.resize(vertex->count);
  const char* axes[] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    const auto& v = require(axes[k]);
    for (size_t i = 0; i < vertex->count; ++i) cloud.gaussians[i].mean[k] = v[i];
  }
  for (int c = 0; c < 3; ++c) {
    const auto& v = require("f_dc_" + std::to_string(c));
    for (size_t i = 0; i < vertex->count; ++i) cloud.gaussians[i].sh_at(0, c) = v[i];
  }
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < rest; ++k) {
      const auto& v = require("f_rest_" + std::to_string(c * rest + k));
      for (size_t i = 0; i < vertex->count; ++i) cloud.gaussians[i].sh_at(k + 1, c) = v[i];
    }
  }
  {
    const auto& v = require("opacity");
    for (size_t i = 0; i < vertex->count; ++i) cloud.gaussians[i].opacity_logit = v[i];
  }
  for (int k = 0; k < 3; ++k) {
    const auto& v = require("scale_" + std::to_string(k));
    for (size_t i = 0; i < vertex->count; ++i) cloud.gaussians[i].log_scale[k] = v[i];
  }
  for (int k = 0; k < 4; ++k) {
    const auto& v = require("rot_" + std::to_string(k));
    for (size_t i = 0; i < vertex->count; ++i) cloud.gaussians[i].rotation[k] = v[i];
  }
  return cloud;
}

GaussianCloud load_cloud(const std::filesystem::path& path) {
  return load_cloud(std::string_view(read_file(path)));
}

}  // namespace shoesplat::gs
