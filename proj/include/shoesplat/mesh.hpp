#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shoesplat/gaussian.hpp"

namespace shoesplat::mesh {

using geom::Vec3;
using Face = std::array<std::uint32_t, 3>;

/// Vertex colours are RGB in [0,1]; `colors` always has one entry per vertex.
struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors;
  std::vector<Face> faces;

  size_t vertex_count() const { return positions.size(); }
  size_t face_count() const { return faces.size(); }
  bool empty() const { return positions.empty() && faces.empty(); }
  void add_vertex(const Vec3& p, const Vec3& c = Vec3::Ones()) {
    positions.push_back(p);
    colors.push_back(c);
  }

  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

/// Samples laid out x-fastest, then y, then z.
struct DensityGrid {
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  std::array<int, 3> dims{2, 2, 2};
  std::vector<double> values;

  size_t index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  double at(int i, int j, int k) const { return values[index(i, j, k)]; }
  Vec3 position(int i, int j, int k) const { return origin + spacing * Vec3(i, j, k); }
  void validate() const;
};

/// sum_g alpha_g exp(-0.5 (p - mu_g)^T Sigma_g^-1 (p - mu_g)).
double density_at(const gs::GaussianCloud& cloud, const Vec3& p);

struct GridOptions {
  int resolution = 128;    // samples along the longest axis
  double sigma_box = 3.0;  // bounding box half size in standard deviations
  int threads = 1;
};

/// Samples the density over the cloud's bounding box. Each Gaussian is
/// evaluated only where its term exceeds 1e-12 of its opacity.
DensityGrid sample_density(const gs::GaussianCloud& cloud, const GridOptions& options = {});

/// Triangulates the iso level set; the inside is where the field is at least
/// `iso`, and faces wind counter-clockwise seen from outside. Vertices on the
/// same grid edge or at the same position are shared and zero-area faces are
/// dropped.
TriangleMesh marching_cubes(const DensityGrid& grid, double iso);

/// Colours every vertex with the opacity-weighted mean DC colour of its `k`
/// nearest Gaussians.
TriangleMesh bake_vertex_colors(const TriangleMesh& mesh, const gs::GaussianCloud& cloud, int k = 8);

inline constexpr double kBlackThreshold = 0.1;

/// Drops vertices whose brightest channel is below `tau`, every face touching
/// them, faces with a repeated vertex, and any vertex left unreferenced.
TriangleMesh remove_black_vertices(const TriangleMesh& mesh, double tau = kBlackThreshold);

/// Connected components of faces that share an edge, as a component id per
/// face numbered in order of first appearance.
std::vector<std::uint32_t> face_components(const TriangleMesh& mesh);

/// Keeps the component with the most faces; ties go to the component with the
/// smallest vertex index.
TriangleMesh largest_connected_component(const TriangleMesh& mesh);

/// Removes vertices no face references, preserving order.
TriangleMesh drop_unreferenced(const TriangleMesh& mesh);

struct CleanReport {
  size_t dark_vertices = 0;
  size_t components = 0;
  size_t dangling_faces = 0;  // out-of-range or repeated vertex index
  size_t unreferenced_vertices = 0;

  bool ok() const { return dark_vertices == 0 && components == 1 && dangling_faces == 0 && unreferenced_vertices == 0; }
};

CleanReport validate_clean(const TriangleMesh& mesh, double tau = kBlackThreshold);

/// remove_black_vertices followed by largest_connected_component.
TriangleMesh clean(const TriangleMesh& mesh, double tau = kBlackThreshold);

/// V - E + F over unique undirected edges.
std::int64_t euler_characteristic(const TriangleMesh& mesh);

double face_area(const TriangleMesh& mesh, const Face& f);
double surface_area(const TriangleMesh& mesh);

}  // namespace shoesplat::mesh
