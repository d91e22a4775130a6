#include "shoesplat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "shoesplat/spatial.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat::mesh {

using geom::Mat3;

void DensityGrid::validate() const {
  for (int d : dims) {
    if (d < 2) fail(ErrorKind::InvalidArgument, "density grid needs at least 2 samples per axis");
  }
  if (!(spacing > 0.0)) fail(ErrorKind::InvalidArgument, "density grid spacing must be positive");
  if (values.size() != static_cast<size_t>(dims[0]) * dims[1] * dims[2]) {
    fail(ErrorKind::DimensionMismatch, "density grid value count does not match its dims");
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "density grid holds a non-finite value");
  }
}

namespace {

struct Term {
  Vec3 mean;
  Mat3 precision;
  double alpha;
  Vec3 half_box;  // where the term can exceed the cutoff
};

// exp(-0.5 m) < 1e-12 beyond this Mahalanobis^2.
const double kCutoffM = 2.0 * std::log(1e12);

Term make_term(const gs::Gaussian& g) {
  const Mat3 cov = gs::covariance3d(g);
  Term t;
  t.mean = g.mean;
  t.precision = cov.inverse();
  t.alpha = g.opacity();
  t.half_box = (kCutoffM * cov.diagonal()).cwiseSqrt();
  return t;
}

double term_value(const Term& t, const Vec3& p) {
  const Vec3 d = p - t.mean;
  return t.alpha * std::exp(-0.5 * d.dot(t.precision * d));
}

}  // namespace

double density_at(const gs::GaussianCloud& cloud, const Vec3& p) {
  double sum = 0.0;
  for (const auto& g : cloud.gaussians) {
    const Mat3 cov = gs::covariance3d(g);
    const Vec3 d = p - g.mean;
    sum += g.opacity() * std::exp(-0.5 * d.dot(cov.inverse() * d));
  }
  return sum;
}

DensityGrid sample_density(const gs::GaussianCloud& cloud, const GridOptions& options) {
  if (cloud.empty()) fail(ErrorKind::EmptyPointCloud, "cannot sample the density of an empty cloud");
  if (options.resolution < 2) fail(ErrorKind::InvalidArgument, "grid resolution must be >= 2");
  std::vector<Term> terms;
  terms.reserve(cloud.size());
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& g : cloud.gaussians) {
    terms.push_back(make_term(g));
    const Vec3 r = options.sigma_box * gs::covariance3d(g).diagonal().cwiseSqrt();
    lo = lo.cwiseMin(g.mean - r);
    hi = hi.cwiseMax(g.mean + r);
  }
  const double longest = (hi - lo).maxCoeff();
  DensityGrid grid;
  grid.origin = lo;
  grid.spacing = longest > 0.0 ? longest / (options.resolution - 1) : 1.0;
  for (int d = 0; d < 3; ++d) {
    const int n = static_cast<int>(std::ceil((hi[d] - lo[d]) / grid.spacing - 1e-9)) + 1;
    grid.dims[d] = std::clamp(n, 2, options.resolution);
  }
  const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
  grid.values.assign(static_cast<size_t>(nx) * ny * nz, 0.0);

  // One task per z slice; within a voxel, terms are summed in cloud order.
  parallel_for(static_cast<size_t>(nz), options.threads, [&](size_t kk) {
    const int k = static_cast<int>(kk);
    const double z = grid.origin.z() + k * grid.spacing;
    for (const Term& t : terms) {
      if (std::abs(z - t.mean.z()) > t.half_box.z()) continue;
      auto range = [&](int d, int n) {
        const double a = (t.mean[d] - t.half_box[d] - grid.origin[d]) / grid.spacing;
        const double b = (t.mean[d] + t.half_box[d] - grid.origin[d]) / grid.spacing;
        return std::pair<int, int>{std::max(0, static_cast<int>(std::ceil(a))),
                                   std::min(n - 1, static_cast<int>(std::floor(b)))};
      };
      const auto [i0, i1] = range(0, nx);
      const auto [j0, j1] = range(1, ny);
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
          grid.values[grid.index(i, j, k)] += term_value(t, grid.position(i, j, k));
        }
      }
    }
  });
  return grid;
}

TriangleMesh bake_vertex_colors(const TriangleMesh& mesh, const gs::GaussianCloud& cloud, int k) {
  if (cloud.empty()) fail(ErrorKind::EmptyPointCloud, "cannot bake colours from an empty cloud");
  if (k < 1) fail(ErrorKind::InvalidArgument, "k must be >= 1");
  std::vector<Vec3> means;
  means.reserve(cloud.size());
  for (const auto& g : cloud.gaussians) means.push_back(g.mean);
  const KdTree tree(means);
  TriangleMesh out = mesh;
  for (size_t v = 0; v < mesh.positions.size(); ++v) {
    const auto nn = tree.nearest(mesh.positions[v], static_cast<size_t>(k));
    Vec3 acc = Vec3::Zero(), plain = Vec3::Zero();
    double wsum = 0.0;
    for (const auto& n : nn) {
      const auto& g = cloud.gaussians[n.index];
      const Vec3 c = gs::dc_color(g);
      acc += g.opacity() * c;
      plain += c;
      wsum += g.opacity();
    }
    out.colors[v] = wsum > 0.0 ? Vec3(acc / wsum) : Vec3(plain / static_cast<double>(nn.size()));
  }
  return out;
}

namespace {

// Keeps the listed faces and the vertices they use, preserving order.
TriangleMesh subset(const TriangleMesh& mesh, const std::vector<bool>& keep_face) {
  std::vector<std::int64_t> remap(mesh.positions.size(), -1);
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!keep_face[f]) continue;
    for (auto v : mesh.faces[f]) remap[v] = 0;
  }
  TriangleMesh out;
  for (size_t v = 0; v < mesh.positions.size(); ++v) {
    if (remap[v] < 0) continue;
    remap[v] = static_cast<std::int64_t>(out.positions.size());
    out.add_vertex(mesh.positions[v], mesh.colors[v]);
  }
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!keep_face[f]) continue;
    const Face& src = mesh.faces[f];
    out.faces.push_back({static_cast<std::uint32_t>(remap[src[0]]), static_cast<std::uint32_t>(remap[src[1]]),
                         static_cast<std::uint32_t>(remap[src[2]])});
  }
  return out;
}

void check_mesh(const TriangleMesh& mesh) {
  if (mesh.colors.size() != mesh.positions.size()) {
    fail(ErrorKind::DimensionMismatch, "mesh colour count does not match its vertex count");
  }
  for (const auto& f : mesh.faces) {
    for (auto v : f) {
      if (v >= mesh.positions.size()) fail(ErrorKind::FormatError, "face references a missing vertex");
    }
  }
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

TriangleMesh drop_unreferenced(const TriangleMesh& mesh) {
  check_mesh(mesh);
  return subset(mesh, std::vector<bool>(mesh.faces.size(), true));
}

TriangleMesh remove_black_vertices(const TriangleMesh& mesh, double tau) {
  check_mesh(mesh);
  std::vector<bool> dark(mesh.positions.size());
  for (size_t v = 0; v < mesh.positions.size(); ++v) dark[v] = mesh.colors[v].maxCoeff() < tau;
  std::vector<bool> keep(mesh.faces.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    const bool degenerate = face[0] == face[1] || face[1] == face[2] || face[0] == face[2];
    keep[f] = !degenerate && !dark[face[0]] && !dark[face[1]] && !dark[face[2]];
  }
  return subset(mesh, keep);
}

std::vector<std::uint32_t> face_components(const TriangleMesh& mesh) {
  check_mesh(mesh);
  std::map<std::uint64_t, std::vector<std::uint32_t>> edge_faces;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (int e = 0; e < 3; ++e) {
      edge_faces[edge_key(face[e], face[(e + 1) % 3])].push_back(static_cast<std::uint32_t>(f));
    }
  }
  const std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp(mesh.faces.size(), unset);
  std::uint32_t next = 0;
  std::vector<std::uint32_t> queue;
  for (size_t start = 0; start < mesh.faces.size(); ++start) {
    if (comp[start] != unset) continue;
    comp[start] = next;
    queue.assign(1, static_cast<std::uint32_t>(start));
    while (!queue.empty()) {
      const std::uint32_t f = queue.back();
      queue.pop_back();
      const Face& face = mesh.faces[f];
      for (int e = 0; e < 3; ++e) {
        for (auto g : edge_faces[edge_key(face[e], face[(e + 1) % 3])]) {
          if (comp[g] == unset) {
            comp[g] = next;
            queue.push_back(g);
          }
        }
      }
    }
    ++next;
  }
  return comp;
}

TriangleMesh largest_connected_component(const TriangleMesh& mesh) {
  const auto comp = face_components(mesh);
  if (comp.empty()) return drop_unreferenced(mesh);
  const std::uint32_t n = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<size_t> faces(n, 0);
  std::vector<std::uint32_t> min_vertex(n, std::numeric_limits<std::uint32_t>::max());
  for (size_t f = 0; f < comp.size(); ++f) {
    ++faces[comp[f]];
    for (auto v : mesh.faces[f]) min_vertex[comp[f]] = std::min(min_vertex[comp[f]], v);
  }
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < n; ++c) {
    if (faces[c] > faces[best] || (faces[c] == faces[best] && min_vertex[c] < min_vertex[best])) best = c;
  }
  std::vector<bool> keep(comp.size());
  for (size_t f = 0; f < comp.size(); ++f) keep[f] = comp[f] == best;
  return subset(mesh, keep);
}

TriangleMesh clean(const TriangleMesh& mesh, double tau) {
  return largest_connected_component(remove_black_vertices(mesh, tau));
}

CleanReport validate_clean(const TriangleMesh& mesh, double tau) {
  CleanReport r;
  for (const auto& c : mesh.colors) {
    if (c.maxCoeff() < tau) ++r.dark_vertices;
  }
  std::vector<bool> used(mesh.positions.size(), false);
  TriangleMesh valid;
  valid.positions = mesh.positions;
  valid.colors = mesh.colors;
  valid.colors.resize(mesh.positions.size(), Vec3::Ones());
  for (const auto& f : mesh.faces) {
    const bool in_range = f[0] < used.size() && f[1] < used.size() && f[2] < used.size();
    if (!in_range || f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      ++r.dangling_faces;
      continue;
    }
    for (auto v : f) used[v] = true;
    valid.faces.push_back(f);
  }
  r.unreferenced_vertices = static_cast<size_t>(std::count(used.begin(), used.end(), false));
  const auto comp = face_components(valid);
  r.components = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  return r;
}

std::int64_t euler_characteristic(const TriangleMesh& mesh) {
  std::set<std::uint64_t> edges;
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) edges.insert(edge_key(f[e], f[(e + 1) % 3]));
  }
  return static_cast<std::int64_t>(mesh.positions.size()) - static_cast<std::int64_t>(edges.size()) +
         static_cast<std::int64_t>(mesh.faces.size());
}

double face_area(const TriangleMesh& mesh, const Face& f) {
  const Vec3& a = mesh.positions[f[0]];
  return 0.5 * (mesh.positions[f[1]] - a).cross(mesh.positions[f[2]] - a).norm();
}

double surface_area(const TriangleMesh& mesh) {
  double s = 0.0;
  for (const auto& f : mesh.faces) s += face_area(mesh, f);
  return s;
}

}  // namespace shoesplat::mesh
