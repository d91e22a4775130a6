// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.
//
//   shoesplat_acceptance --workdir DIR [--only 1,2,...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "shoesplat/colmap_io.hpp"
#include "shoesplat/logging.hpp"
#include "shoesplat/metrics.hpp"
#include "shoesplat/pipeline.hpp"
#include "shoesplat/splat_ply.hpp"

namespace fs = std::filesystem;
using namespace shoesplat;
using Clock = std::chrono::steady_clock;
using geom::Vec3;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_double(double v, int prec = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- 1 and 9

struct SynthRun {
  double psnr = 0.0;
  double seconds = 0.0;
  size_t test_views = 0;
};

SynthRun run_synth_pipeline(const fs::path& dir, int threads) {
  using namespace pipeline;
  fs::remove_all(dir);
  PipelineConfig cfg;
  cfg.threads = threads;
  cfg.synth.seed = 0;
  cfg.synth.n_gaussians = 20;
  cfg.synth.n_views = 24;
  cfg.synth.width = cfg.synth.height = 128;
  cfg.train.iterations = 2000;
  finalize(cfg);

  const auto t0 = Clock::now();
  cmd_synth(dir / "synth", cfg.synth);
  cmd_import(dir / "synth" / "sparse" / "0", dir / "frames.csv");
  cmd_prep(dir / "frames.csv", dir / "synth" / "images", dir / "synth" / "masks", dir / "synth" / "sparse" / "0",
           dir / "data", cfg);
  cmd_train(dir / "data", dir / "run", cfg);
  const auto report = cmd_eval(dir / "run" / "checkpoint.ply", dir / "data", dir / "eval", cfg);
  SynthRun r;
  r.seconds = seconds_since(t0);
  r.psnr = report.mean_psnr;
  r.test_views = report.n_views;
  cmd_extract(dir / "run" / "checkpoint.ply", dir / "mesh_raw.ply", cfg);
  cmd_clean(dir / "mesh_raw.ply", dir / "mesh.ply", cfg.mesh.tau);
  return r;
}

Outcome criterion_synthetic(const fs::path& work) {
  const auto r = run_synth_pipeline(work / "synth_t1", 1);
  Outcome o;
  o.pass = r.psnr >= 30.0 && r.seconds < 600.0;
  o.detail = "held-out PSNR " + fmt_double(r.psnr, 2) + " dB over " + std::to_string(r.test_views) +
             " views (need >= 30), " + fmt_double(r.seconds, 1) + " s (need < 600)";
  return o;
}

Outcome criterion_determinism(const fs::path& work) {
  const fs::path a = work / "synth_t1";
  if (!fs::exists(a / "mesh.ply")) run_synth_pipeline(a, 1);
  const fs::path b = work / "synth_t4";
  run_synth_pipeline(b, 4);
  const std::vector<fs::path> files = {"run/loss_trace.csv", "run/checkpoint.ply", "run/checkpoint.json",
                                       "mesh_raw.ply", "mesh.ply"};
  std::vector<std::string> differing;
  for (const auto& f : files) {
    if (read_file(a / f) != read_file(b / f)) differing.push_back(f.string());
  }
  Outcome o;
  o.pass = differing.empty();
  if (o.pass) {
    o.detail = "threads 1 vs 4: " + std::to_string(files.size()) + " artifacts bit-identical";
  } else {
    o.detail = "differs:";
    for (const auto& d : differing) o.detail += " " + d;
  }
  return o;
}

// ---------------------------------------------------------------- 2

Outcome criterion_gradients() {
  Rng rng(2024);
  size_t checked = 0, failures = 0, scenes = 0;
  std::string first;
  for (int s = 0; s < 24; ++s) {
    const bool single = s % 2 == 0;
    const int degree = (s / 2) % 4;
    auto cloud = oracle::random_scene(rng, single ? 1 : 2 + static_cast<int>(rng.below(4)), degree);
    if (single) cloud.gaussians[0].mean = Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(2.5, 4));
    const auto cam = single ? oracle::front_camera(64, 64, 70.0) : oracle::front_camera(48, 40, 45.0);
    const Vec3 bg(rng.uniform(), rng.uniform(), rng.uniform());
    const auto target = oracle::random_image(rng, cam.width, cam.height);
    const auto r = oracle::check_gradients(cloud, cam, bg, target);
    checked += r.checked;
    failures += r.failures;
    if (first.empty() && !r.messages.empty()) first = r.messages.front();
    ++scenes;
  }
  Outcome o;
  o.pass = failures == 0 && scenes >= 20;
  o.detail = std::to_string(scenes) + " scenes, " + std::to_string(checked) + " parameters, " +
             std::to_string(failures) + " outside 1e-3 rel / 1e-6 abs";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// ---------------------------------------------------------------- 3

Outcome criterion_rasterizer() {
  Rng rng(3030);
  int mismatches = 0;
  for (int s = 0; s < 50; ++s) {
    const int n = 1 + static_cast<int>(rng.below(100));
    const auto cloud = oracle::random_scene(rng, n, static_cast<int>(rng.below(4)));
    const auto cam = oracle::front_camera(32 + static_cast<int>(rng.below(80)), 32 + static_cast<int>(rng.below(80)),
                                          rng.uniform(30, 90));
    const Vec3 bg(rng.uniform(), rng.uniform(), rng.uniform());
    const auto tiled = raster::render(cloud, cam, bg);
    const auto naive = oracle::naive_render(cloud, cam, bg);
    bool same = tiled.color.data() == naive.color.data() && tiled.alpha == naive.alpha;
    for (size_t i = 0; same && i < tiled.color.size(); ++i) {
      const float a = static_cast<float>(tiled.color.data()[i]), b = static_cast<float>(naive.color.data()[i]);
      same = std::memcmp(&a, &b, sizeof a) == 0;
    }
    mismatches += !same;
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = "50 scenes of 1-100 Gaussians, " + std::to_string(mismatches) + " differ from the reference";
  return o;
}

// ---------------------------------------------------------------- 4

Outcome criterion_metrics() {
  using namespace metrics;
  std::vector<std::string> bad;
  auto near = [&](const std::string& what, double got, double want) {
    if (!(std::abs(got - want) <= 1e-9)) bad.push_back(what + "=" + std::to_string(got));
  };
  ImageU8 z(1, 1, 1, 0), f(1, 1, 1, 255);
  near("mse(0,255)", mse(z, f), 65025.0);
  ImageU8 o(2, 2, 1, 10), r(2, 2, 1, 10);
  r.at(0, 0) = 11;
  r.at(1, 0) = 12;
  r.at(0, 1) = 13;
  r.at(1, 1) = 14;
  near("mse(2x2)", mse(o, r), 7.5);
  near("mse(a,a)", mse(o, o), 0.0);
  near("psnr(65025)", psnr_from_mse(65025.0, 255.0), 0.0);
  const double p40 = psnr_from_mse(6.5025, 255.0);
  near("psnr(6.5025)", p40, 40.0);
  if (psnr(o, o) != kInfinity) bad.push_back("psnr(a,a) not inf");
  ConfusionCounts c;
  c.tp = 50;
  c.fp = 25;
  c.fn = 25;
  near("iou(50,25,25)", iou(c), 0.5);
  MaskBuffer e(4, 4, 1, 0.0), one(4, 4, 1, 0.0), other(4, 4, 1, 0.0);
  one.at(0, 0) = 1.0;
  other.at(3, 3) = 1.0;
  near("iou(empty,empty)", iou(e, e), 1.0);
  near("iou(a,a)", iou(one, one), 1.0);
  near("iou(disjoint)", iou(one, other), 0.0);

  Outcome out;
  out.pass = bad.empty();
  out.detail = bad.empty() ? "10 examples within 1e-9; psnr(255, 6.5025) = " + fmt_double(p40, 15) : "";
  for (const auto& b : bad) out.detail += b + " ";
  return out;
}

// ---------------------------------------------------------------- 5

colmap::CameraIntrinsics random_camera(Rng& rng, std::uint32_t id) {
  colmap::CameraIntrinsics c;
  c.camera_id = id;
  c.model = static_cast<colmap::CameraModel>(rng.below(3));
  c.width = 1 + rng.below(4096);
  c.height = 1 + rng.below(4096);
  c.params.resize(colmap::model_param_count(c.model));
  for (auto& p : c.params) p = rng.uniform(1, 2000);
  if (c.model == colmap::CameraModel::SimpleRadial) c.params.back() = rng.uniform(-0.2, 0.2);
  return c;
}

colmap::ViewPose random_pose(Rng& rng, std::uint32_t id) {
  colmap::ViewPose p;
  p.image_id = id;
  p.rotation = oracle::random_quat(rng);
  p.translation = {rng.normal(), rng.normal(), rng.normal()};
  p.camera_id = 1 + static_cast<std::uint32_t>(rng.below(5));
  p.image_name = "frame_" + std::to_string(rng.below(100000)) + ".png";
  const size_t n = rng.below(6);
  for (size_t i = 0; i < n; ++i) {
    p.observations.push_back({rng.uniform(0, 1000), rng.uniform(0, 1000),
                              rng.uniform() < 0.3 ? -1 : static_cast<std::int64_t>(rng.below(1000))});
  }
  return p;
}

colmap::SparsePoint random_point(Rng& rng, std::uint64_t id) {
  colmap::SparsePoint p;
  p.point3d_id = id;
  p.position = {rng.normal(), rng.normal(), rng.normal()};
  p.color = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
             static_cast<std::uint8_t>(rng.below(256))};
  p.reprojection_error = rng.uniform(0, 2);
  const size_t n = 1 + rng.below(4);
  for (size_t i = 0; i < n; ++i) {
    p.track.push_back({static_cast<std::uint32_t>(rng.below(100)), static_cast<std::uint32_t>(rng.below(1000))});
  }
  return p;
}

double float_exact(Rng& rng, double lo, double hi) {
  // volatile keeps the float rounding from being optimised away
  volatile float f = static_cast<float>(rng.uniform(lo, hi));
  return f;
}

gs::GaussianCloud random_float_cloud(Rng& rng) {
  gs::GaussianCloud c;
  c.sh_degree = static_cast<int>(rng.below(4));
  const size_t n = rng.below(4);
  for (size_t i = 0; i < n; ++i) {
    gs::Gaussian g;
    for (int k = 0; k < 3; ++k) g.mean[k] = float_exact(rng, -3, 3);
    for (int k = 0; k < 3; ++k) g.log_scale[k] = float_exact(rng, -5, 0);
    for (int k = 0; k < 4; ++k) g.rotation[k] = float_exact(rng, -1, 1);
    g.opacity_logit = float_exact(rng, -4, 4);
    for (int k = 0; k < gs::sh_coeff_count(c.sh_degree) * 3; ++k) g.sh[k] = float_exact(rng, -1, 1);
    c.gaussians.push_back(g);
  }
  return c;
}

mesh::TriangleMesh random_float_mesh(Rng& rng) {
  mesh::TriangleMesh m;
  const size_t n = 1 + rng.below(6);
  for (size_t i = 0; i < n; ++i) {
    m.add_vertex(Vec3(float_exact(rng, -2, 2), float_exact(rng, -2, 2), float_exact(rng, -2, 2)),
                 Vec3(rng.below(256), rng.below(256), rng.below(256)) / 255.0);
  }
  const size_t nf = rng.below(5);
  for (size_t f = 0; f < nf; ++f) {
    m.faces.push_back({static_cast<std::uint32_t>(rng.below(n)), static_cast<std::uint32_t>(rng.below(n)),
                       static_cast<std::uint32_t>(rng.below(n))});
  }
  return m;
}

/// Returns an empty string on success, otherwise what went wrong.
std::string round_trip_case(Rng& rng, int kind) {
  using colmap::FileFormat;
  const FileFormat fmt = rng.below(2) ? FileFormat::Binary : FileFormat::Text;
  switch (kind) {
    case 0: {
      colmap::CameraMap cams;
      for (size_t i = 0, n = rng.below(4); i < n; ++i) {
        const auto id = static_cast<std::uint32_t>(1 + rng.below(1000));
        cams[id] = random_camera(rng, id);
      }
      if (colmap::parse_cameras(colmap::write_cameras(cams, fmt), fmt) != cams) return "cameras";
      return {};
    }
    case 1: {
      colmap::PoseMap poses;
      for (size_t i = 0, n = rng.below(4); i < n; ++i) {
        const auto id = static_cast<std::uint32_t>(1 + rng.below(1000));
        poses[id] = random_pose(rng, id);
      }
      if (colmap::parse_images(colmap::write_images(poses, fmt), fmt) != poses) return "images";
      return {};
    }
    case 2: {
      colmap::PointMap pts;
      for (size_t i = 0, n = rng.below(4); i < n; ++i) {
        const auto id = 1 + rng.below(1u << 20);
        pts[id] = random_point(rng, id);
      }
      if (colmap::parse_points3d(colmap::write_points3d(pts, fmt), fmt) != pts) return "points3D";
      return {};
    }
    case 3: {
      const auto cloud = random_float_cloud(rng);
      if (gs::load_cloud(std::string_view(gs::save_cloud(cloud))) != cloud) return "splat ply";
      return {};
    }
    default: {
      const auto m = random_float_mesh(rng);
      const auto f = rng.below(2) ? mesh::MeshFormat::PlyBinary : mesh::MeshFormat::PlyAscii;
      if (mesh::parse_ply_mesh(mesh::serialize_mesh(m, f)) != m) return "mesh ply";
      return {};
    }
  }
}

std::string mutate(Rng& rng, std::string bytes) {
  const int ops = 1 + static_cast<int>(rng.below(4));
  for (int op = 0; op < ops; ++op) {
    const size_t n = bytes.size();
    switch (rng.below(6)) {
      case 0:  // flip bits
        if (n) bytes[rng.below(n)] ^= static_cast<char>(1u << rng.below(8));
        break;
      case 1:  // random byte
        if (n) bytes[rng.below(n)] = static_cast<char>(rng.below(256));
        break;
      case 2:  // truncate
        bytes.resize(rng.below(n + 1));
        break;
      case 3: {  // overwrite with an extreme 64-bit value
        if (n < 8) break;
        const std::uint64_t extremes[] = {0, ~0ull, 1ull << 63, 0x7fffffffull, 0xffffffffull, rng.next()};
        const std::uint64_t v = extremes[rng.below(6)];
        std::memcpy(bytes.data() + rng.below(n - 7), &v, 8);
        break;
      }
      case 4: {  // duplicate a slice
        if (!n) break;
        const size_t a = rng.below(n), len = 1 + rng.below(std::min<size_t>(64, n - a));
        bytes.insert(rng.below(n + 1), bytes.substr(a, len));
        break;
      }
      default: {  // insert random bytes
        std::string junk(1 + rng.below(16), '\0');
        for (auto& ch : junk) ch = static_cast<char>(rng.below(256));
        bytes.insert(rng.below(n + 1), junk);
        break;
      }
    }
  }
  return bytes;
}

Outcome criterion_parsers(double fuzz_seconds) {
  Rng rng(5005);
  const size_t cases = 100000;
  size_t rt_failures = 0;
  std::string first;
  for (size_t i = 0; i < cases; ++i) {
    const std::string what = round_trip_case(rng, static_cast<int>(i % 5));
    if (!what.empty()) {
      ++rt_failures;
      if (first.empty()) first = what + " case " + std::to_string(i);
    }
  }

  // Seed corpus: valid binary files for every binary parser.
  using colmap::FileFormat;
  std::vector<std::pair<std::string, std::function<void(std::string_view)>>> targets;
  {
    colmap::CameraMap cams;
    colmap::PoseMap poses;
    colmap::PointMap pts;
    for (std::uint32_t i = 1; i <= 3; ++i) {
      cams[i] = random_camera(rng, i);
      poses[i] = random_pose(rng, i);
      pts[i] = random_point(rng, i);
    }
    targets.push_back({colmap::write_cameras(cams, FileFormat::Binary),
                       [](std::string_view b) { colmap::parse_cameras(b, FileFormat::Binary); }});
    targets.push_back({colmap::write_images(poses, FileFormat::Binary),
                       [](std::string_view b) { colmap::parse_images(b, FileFormat::Binary); }});
    targets.push_back({colmap::write_points3d(pts, FileFormat::Binary),
                       [](std::string_view b) { colmap::parse_points3d(b, FileFormat::Binary); }});
    gs::GaussianCloud cloud = oracle::random_scene(rng, 3, 1);
    targets.push_back({gs::save_cloud(cloud), [](std::string_view b) { gs::load_cloud(b); }});
    auto m = random_float_mesh(rng);
    targets.push_back({mesh::serialize_mesh(m, mesh::MeshFormat::PlyBinary),
                       [](std::string_view b) { mesh::parse_ply_mesh(b); }});
  }

  size_t fuzzed = 0, typed = 0, untyped = 0;
  std::string untyped_msg;
  const auto t0 = Clock::now();
  while (seconds_since(t0) < fuzz_seconds) {
    for (int batch = 0; batch < 200; ++batch) {
      const auto& [seed, parse] = targets[fuzzed % targets.size()];
      const std::string input = mutate(rng, seed);
      ++fuzzed;
      try {
        parse(input);
      } catch (const Error&) {
        ++typed;
      } catch (const std::exception& e) {
        ++untyped;
        if (untyped_msg.empty()) untyped_msg = e.what();
      }
    }
  }

  Outcome o;
  o.pass = rt_failures == 0 && untyped == 0;
  o.detail = std::to_string(cases) + " round trips, " + std::to_string(rt_failures) + " failed; " +
             std::to_string(fuzzed) + " fuzz inputs in " + fmt_double(fuzz_seconds, 0) + " s, " +
             std::to_string(typed) + " typed errors, " + std::to_string(untyped) + " untyped";
  if (!first.empty()) o.detail += "; first round-trip failure: " + first;
  if (!untyped_msg.empty()) o.detail += "; untyped: " + untyped_msg;
  return o;
}

// ---------------------------------------------------------------- 6

Outcome criterion_cleanup(const fs::path& work) {
  const fs::path dir = work / "cleanup";
  fs::create_directories(dir);
  Rng rng(6006);
  int invalid = 0, mismatched = 0;
  for (int t = 0; t < 100; ++t) {
    const auto dirty = oracle::dirty_mesh(rng);
    const fs::path in = dir / "dirty.ply";
    const fs::path out = dir / (t % 2 ? "clean.ply" : "clean.obj");
    mesh::write_mesh(dirty, in, mesh::MeshFormat::PlyBinary);
    pipeline::cmd_clean(in, out, mesh::kBlackThreshold);
    const auto cleaned = mesh::read_mesh(out);
    invalid += !mesh::validate_clean(cleaned, mesh::kBlackThreshold).ok();
    mismatched += oracle::face_positions(cleaned) != oracle::expected_clean_faces(dirty, mesh::kBlackThreshold);
  }
  Outcome o;
  o.pass = invalid == 0 && mismatched == 0;
  o.detail = "100 dirty meshes, " + std::to_string(invalid) + " fail the validator, " + std::to_string(mismatched) +
             " differ from the union-find oracle";
  return o;
}

// ---------------------------------------------------------------- 7

Outcome criterion_marching_cubes() {
  const double sigma = 0.5, alpha = 0.8;
  gs::GaussianCloud cloud;
  cloud.sh_degree = 0;
  gs::Gaussian g;
  g.log_scale = Vec3::Constant(std::log(sigma));
  g.opacity_logit = gs::logit(alpha);
  cloud.gaussians.push_back(g);
  std::string detail;
  bool pass = true;
  for (int res : {32, 64, 96}) {
    mesh::GridOptions opt;
    opt.resolution = res;
    const auto grid = mesh::sample_density(cloud, opt);
    const auto m = mesh::marching_cubes(grid, alpha * std::exp(-2.0));
    double worst = 0.0;
    for (const auto& p : m.positions) worst = std::max(worst, std::abs(p.norm() - 2 * sigma));
    const auto chi = mesh::euler_characteristic(m);
    const bool ok = !m.faces.empty() && chi == 2 && worst <= grid.spacing;
    pass = pass && ok;
    detail += "res " + std::to_string(res) + ": chi " + std::to_string(chi) + ", max |r-2s| " +
              fmt_double(worst, 4) + " <= spacing " + fmt_double(grid.spacing, 4) + "; ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 8

Outcome criterion_best_checkpoint() {
  Rng rng(8008);
  int wrong = 0;
  for (int t = 0; t < 1000; ++t) {
    train::BestCheckpointTracker tracker;
    const size_t n = 1 + rng.below(30);
    const bool coarse = rng.below(2);  // coarse values force ties
    int iteration = 0, want_it = -1;
    double want_psnr = -metrics::kInfinity;
    for (size_t i = 0; i < n; ++i) {
      iteration += 1 + static_cast<int>(rng.below(500));
      double p = coarse ? static_cast<double>(20 + rng.below(5)) : rng.uniform(10, 45);
      if (rng.uniform() < 0.02) p = metrics::kInfinity;
      gs::GaussianCloud c;
      c.gaussians.emplace_back();
      c.gaussians[0].mean.x() = iteration;
      tracker.offer(iteration, p, rng.uniform(), c);
      if (p > want_psnr) {
        want_psnr = p;
        want_it = iteration;
      }
    }
    const auto& best = tracker.best();
    const bool ok = best && best->iteration == want_it && best->eval_psnr == want_psnr &&
                    best->cloud.gaussians[0].mean.x() == want_it;
    wrong += !ok;
  }
  return {wrong == 0, "1000 traces, " + std::to_string(wrong) + " picked the wrong checkpoint"};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "shoesplat_acceptance";
  std::set<int> only;
  double fuzz_seconds = 60.0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workdir" && i + 1 < argc) {
      work = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else if (a == "--fuzz-seconds" && i + 1 < argc) {
      fuzz_seconds = std::stod(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--workdir DIR] [--only 1,2,...] [--fuzz-seconds S]\n", argv[0]);
      return 1;
    }
  }
  setenv(kLogLevelEnv, "error", 0);
  init_logging();
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"synthetic reconstruction", [&] { return criterion_synthetic(work); }},
      {"gradient suite", criterion_gradients},
      {"rasterizer oracle", criterion_rasterizer},
      {"metric exactness", criterion_metrics},
      {"parser robustness", [&] { return criterion_parsers(fuzz_seconds); }},
      {"mesh cleanup validator", [&] { return criterion_cleanup(work); }},
      {"marching cubes sphere", criterion_marching_cubes},
      {"best checkpoint rule", criterion_best_checkpoint},
      {"determinism", [&] { return criterion_determinism(work); }},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
