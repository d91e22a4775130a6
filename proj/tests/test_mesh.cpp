#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "oracles.hpp"
#include "shoesplat/mesh.hpp"
#include "shoesplat/mesh_io.hpp"
#include "shoesplat/spatial.hpp"

using namespace shoesplat;
using namespace shoesplat::mesh;

namespace {

gs::GaussianCloud lone_gaussian(double sigma, double alpha, const Vec3& mean = Vec3::Zero()) {
  gs::GaussianCloud cloud;
  cloud.sh_degree = 0;
  gs::Gaussian g;
  g.mean = mean;
  g.log_scale = Vec3::Constant(std::log(sigma));
  g.opacity_logit = gs::logit(alpha);
  cloud.gaussians.push_back(g);
  return cloud;
}

TriangleMesh tetrahedron(std::uint32_t base, const Vec3& at) {
  TriangleMesh m;
  m.add_vertex(at);
  m.add_vertex(at + Vec3(1, 0, 0));
  m.add_vertex(at + Vec3(0, 1, 0));
  m.add_vertex(at + Vec3(0, 0, 1));
  m.faces = {{base + 0, base + 2, base + 1}, {base + 0, base + 1, base + 3},
             {base + 0, base + 3, base + 2}, {base + 1, base + 2, base + 3}};
  return m;
}

TriangleMesh append(TriangleMesh a, const TriangleMesh& b) {
  a.positions.insert(a.positions.end(), b.positions.begin(), b.positions.end());
  a.colors.insert(a.colors.end(), b.colors.begin(), b.colors.end());
  a.faces.insert(a.faces.end(), b.faces.begin(), b.faces.end());
  return a;
}

double signed_volume(const TriangleMesh& m) {
  double v = 0.0;
  for (const auto& f : m.faces) {
    v += m.positions[f[0]].dot(m.positions[f[1]].cross(m.positions[f[2]])) / 6.0;
  }
  return v;
}

}  // namespace

TEST(Density, PointExamples) {
  const auto cloud = lone_gaussian(0.4, 0.7, Vec3(1, 2, 3));
  EXPECT_NEAR(density_at(cloud, Vec3(1, 2, 3)), 0.7, 1e-15);
  EXPECT_NEAR(density_at(cloud, Vec3(1 + 3 * 0.4, 2, 3)), 0.7 * std::exp(-4.5), 1e-12);
}

TEST(Density, MatchesBruteForce) {
  Rng rng(1);
  gs::GaussianCloud cloud;
  cloud.sh_degree = 0;
  for (int i = 0; i < 50; ++i) {
    gs::Gaussian g;
    g.mean = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    for (int k = 0; k < 3; ++k) g.log_scale[k] = std::log(rng.uniform(0.05, 0.3));
    g.rotation = oracle::random_quat(rng);
    g.opacity_logit = rng.normal();
    cloud.gaussians.push_back(g);
  }
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
    EXPECT_NEAR(density_at(cloud, p), oracle::density_brute(cloud, p), 1e-9);
  }
  GridOptions opt;
  opt.resolution = 20;
  const auto grid = sample_density(cloud, opt);
  for (int k = 0; k < grid.dims[2]; k += 3) {
    for (int j = 0; j < grid.dims[1]; j += 3) {
      for (int i = 0; i < grid.dims[0]; i += 3) {
        EXPECT_NEAR(grid.at(i, j, k), oracle::density_brute(cloud, grid.position(i, j, k)), 1e-9);
      }
    }
  }
}

TEST(Density, ThreadCountDoesNotChangeGrid) {
  Rng rng(2);
  const auto cloud = oracle::random_scene(rng, 30, 0);
  GridOptions a, b;
  a.resolution = b.resolution = 24;
  b.threads = 4;
  EXPECT_EQ(sample_density(cloud, a).values, sample_density(cloud, b).values);
}

TEST(MarchingCubes, BelowIsoIsEmpty) {
  DensityGrid grid;
  grid.dims = {5, 5, 5};
  grid.values.assign(125, 0.1);
  EXPECT_TRUE(marching_cubes(grid, 0.3).empty());
}

TEST(MarchingCubes, GaussianSphere) {
  const double sigma = 0.5, alpha = 0.8;
  const auto cloud = lone_gaussian(sigma, alpha);
  for (int res : {24, 48, 64}) {
    GridOptions opt;
    opt.resolution = res;
    const auto grid = sample_density(cloud, opt);
    const auto m = marching_cubes(grid, alpha * std::exp(-2.0));
    ASSERT_FALSE(m.faces.empty());
    EXPECT_EQ(euler_characteristic(m), 2) << res;
    for (const auto& p : m.positions) EXPECT_LE(std::abs(p.norm() - 2 * sigma), grid.spacing);
    for (const auto& f : m.faces) EXPECT_GT(face_area(m, f), 1e-12);
    EXPECT_GT(signed_volume(m), 0.0);
    EXPECT_EQ(validate_clean(m, 0.0).components, 1u);
  }
}

TEST(MarchingCubes, SphereAreaOnCoarseGrid) {
  DensityGrid grid;
  grid.dims = {32, 32, 32};
  grid.spacing = 2.0 / 31.0;
  grid.origin = Vec3::Constant(-1.0);
  const double r = 0.7;
  grid.values.resize(32 * 32 * 32);
  for (int k = 0; k < 32; ++k) {
    for (int j = 0; j < 32; ++j) {
      for (int i = 0; i < 32; ++i) grid.values[grid.index(i, j, k)] = r - grid.position(i, j, k).norm();
    }
  }
  const auto m = marching_cubes(grid, 0.0);
  const double expected = 4.0 * std::numbers::pi * r * r;
  EXPECT_LT(std::abs(surface_area(m) - expected) / expected, 0.05);
  EXPECT_EQ(euler_characteristic(m), 2);
}

TEST(Bake, SingleGaussianColour) {
  auto cloud = lone_gaussian(0.3, 0.9);
  cloud.gaussians[0].sh_at(0, 0) = 0.8;
  cloud.gaussians[0].sh_at(0, 2) = -0.5;
  TriangleMesh m = tetrahedron(0, Vec3(0.2, 0.1, 0));
  const auto baked = bake_vertex_colors(m, cloud);
  for (const auto& c : baked.colors) EXPECT_TRUE(c.isApprox(gs::dc_color(cloud.gaussians[0]), 1e-12));
}

TEST(Bake, SeparatedGaussians) {
  gs::GaussianCloud cloud = lone_gaussian(0.1, 0.9);
  cloud.gaussians.push_back(cloud.gaussians[0]);
  cloud.gaussians[0].sh_at(0, 0) = 1.5;
  cloud.gaussians[1].mean = Vec3(10, 0, 0);
  cloud.gaussians[1].sh_at(0, 2) = 1.5;
  TriangleMesh m = append(tetrahedron(0, Vec3(0, 0, 0)), tetrahedron(4, Vec3(10, 0, 0)));
  const auto baked = bake_vertex_colors(m, cloud, 1);
  for (int v = 0; v < 4; ++v) EXPECT_EQ(baked.colors[v], gs::dc_color(cloud.gaussians[0]));
  for (int v = 4; v < 8; ++v) EXPECT_EQ(baked.colors[v], gs::dc_color(cloud.gaussians[1]));
}

TEST(Bake, MatchesBruteForceNeighbours) {
  Rng rng(3);
  const auto cloud = oracle::random_scene(rng, 40, 0);
  TriangleMesh m;
  for (int i = 0; i < 60; ++i) m.add_vertex(Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(2, 5)));
  m.faces.push_back({0, 1, 2});
  const auto baked = bake_vertex_colors(m, cloud, 8);
  for (size_t v = 0; v < m.positions.size(); ++v) {
    std::vector<std::pair<double, size_t>> d;
    for (size_t g = 0; g < cloud.size(); ++g) d.push_back({(cloud.gaussians[g].mean - m.positions[v]).squaredNorm(), g});
    std::sort(d.begin(), d.end());
    Vec3 acc = Vec3::Zero();
    double w = 0.0;
    for (int k = 0; k < 8; ++k) {
      const auto& g = cloud.gaussians[d[k].second];
      acc += g.opacity() * gs::dc_color(g);
      w += g.opacity();
    }
    EXPECT_LT((baked.colors[v] - acc / w).norm(), 1e-6);
  }
}

TEST(Cleanup, WhiteUnchangedBlackEmpty) {
  const auto tet = tetrahedron(0, Vec3::Zero());
  EXPECT_EQ(remove_black_vertices(tet), tet);
  auto black = tet;
  for (auto& c : black.colors) c = Vec3::Zero();
  EXPECT_TRUE(remove_black_vertices(black).empty());
}

TEST(Cleanup, CubeWithOneBlackCorner) {
  TriangleMesh cube;
  for (int v = 0; v < 8; ++v) cube.add_vertex(Vec3(v & 1, (v >> 1) & 1, (v >> 2) & 1));
  // Each quad touching vertex 0 is split along the diagonal that avoids it.
  cube.faces = {{0, 2, 1}, {1, 2, 3},   // z = 0
                {0, 1, 4}, {1, 5, 4},   // y = 0
                {0, 4, 2}, {2, 4, 6},   // x = 0
                {1, 3, 7}, {1, 7, 5},   // x = 1
                {2, 7, 3}, {2, 6, 7},   // y = 1
                {4, 5, 7}, {4, 7, 6}};  // z = 1
  size_t incident = 0;
  for (const auto& f : cube.faces) incident += (f[0] == 0 || f[1] == 0 || f[2] == 0);
  ASSERT_EQ(incident, 3u);
  EXPECT_EQ(euler_characteristic(cube), 2);

  cube.colors[0] = Vec3(0.05, 0.02, 0.09);
  const auto out = remove_black_vertices(cube);
  EXPECT_EQ(out.vertex_count(), 7u);
  EXPECT_EQ(out.face_count(), 9u);
  for (const auto& p : out.positions) EXPECT_NE(p, Vec3::Zero());
  EXPECT_TRUE(validate_clean(out).ok());
}

TEST(Cleanup, LargestComponentExamples) {
  const auto tet = tetrahedron(0, Vec3::Zero());
  EXPECT_EQ(largest_connected_component(tet), tet);

  TriangleMesh lone;
  lone.add_vertex(Vec3(5, 0, 0));
  lone.add_vertex(Vec3(6, 0, 0));
  lone.add_vertex(Vec3(5, 1, 0));
  lone.faces = {{4, 5, 6}};
  EXPECT_EQ(largest_connected_component(append(tet, lone)), tet);

  // Second tetrahedron listed first in the faces but built on higher indices.
  TriangleMesh two = append(tet, tetrahedron(4, Vec3(5, 5, 5)));
  std::rotate(two.faces.begin(), two.faces.begin() + 4, two.faces.end());
  EXPECT_EQ(largest_connected_component(two).positions, tet.positions);
}

TEST(Cleanup, EdgeNotVertexAdjacency) {
  // Two triangles touching at a single vertex are separate components.
  TriangleMesh m;
  m.add_vertex(Vec3(0, 0, 0));
  m.add_vertex(Vec3(1, 0, 0));
  m.add_vertex(Vec3(0, 1, 0));
  m.add_vertex(Vec3(-1, 0, 0));
  m.add_vertex(Vec3(0, -1, 0));
  m.faces = {{0, 1, 2}, {0, 3, 4}};
  EXPECT_EQ(face_components(m), (std::vector<std::uint32_t>{0, 1}));
}

TEST(Cleanup, RandomDirtyMeshesMatchUnionFind) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto dirty = oracle::dirty_mesh(rng);
    const auto cleaned = clean(dirty);
    EXPECT_TRUE(validate_clean(cleaned).ok()) << t;
    EXPECT_EQ(oracle::face_positions(cleaned), oracle::expected_clean_faces(dirty, kBlackThreshold)) << t;
    EXPECT_EQ(clean(cleaned), cleaned);
  }
}

TEST(MeshIo, PlyRoundTrip) {
  Rng rng(5);
  TriangleMesh m;
  for (int i = 0; i < 30; ++i) {
    m.add_vertex(Vec3(static_cast<float>(rng.normal()), static_cast<float>(rng.normal()), static_cast<float>(rng.normal())),
                 Vec3(rng.below(256), rng.below(256), rng.below(256)) / 255.0);
  }
  for (int i = 0; i < 20; ++i) {
    m.faces.push_back({static_cast<std::uint32_t>(rng.below(30)), static_cast<std::uint32_t>(rng.below(30)),
                       static_cast<std::uint32_t>(rng.below(30))});
  }
  EXPECT_EQ(parse_ply_mesh(serialize_mesh(m, MeshFormat::PlyBinary)), m);
  EXPECT_EQ(parse_ply_mesh(serialize_mesh(m, MeshFormat::PlyAscii)), m);
  auto fm = m;
  for (auto& c : fm.colors) {
    // volatile: gcc 11 -O3 drops the float rounding for the loop tail
    volatile float r = static_cast<float>(c.x()), g = static_cast<float>(c.y()), b = static_cast<float>(c.z());
    c = Vec3(r, g, b);
  }
  EXPECT_EQ(parse_ply_mesh(serialize_mesh(fm, MeshFormat::PlyBinary, {ColorType::Float32})), fm);
}

TEST(MeshIo, ObjTriangle) {
  TriangleMesh m;
  m.add_vertex(Vec3(0, 0, 0));
  m.add_vertex(Vec3(1, 0, 0));
  m.add_vertex(Vec3(0, 1, 0));
  m.faces = {{0, 1, 2}};
  const std::string obj = serialize_mesh(m, MeshFormat::Obj);
  size_t v = 0, f = 0;
  std::istringstream in(obj);
  for (std::string line; std::getline(in, line);) {
    v += line.rfind("v ", 0) == 0;
    if (line.rfind("f ", 0) == 0) {
      ++f;
      EXPECT_EQ(line, "f 1 2 3");
    }
  }
  EXPECT_EQ(v, 3u);
  EXPECT_EQ(f, 1u);
  EXPECT_EQ(parse_obj_mesh(obj).faces, m.faces);
}

TEST(MeshIo, ObjPolygonsAndErrors) {
  const auto quad = parse_obj_mesh("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4 -3 -2 -1\n");
  EXPECT_EQ(quad.faces, (std::vector<Face>{{0, 1, 2}, {0, 2, 3}}));
  try {
    parse_obj_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FormatError);
  }
  EXPECT_THROW(parse_ply_mesh("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n"), Error);
}
