#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "shoesplat/adam.hpp"
#include "shoesplat/density_control.hpp"
#include "shoesplat/loss.hpp"
#include "shoesplat/synth.hpp"
#include "shoesplat/trainer.hpp"

using namespace shoesplat;
using namespace shoesplat::train;
using geom::Vec3;

TEST(Loss, IdenticalImagesGiveZero) {
  Rng rng(1);
  const ImageF a = oracle::random_image(rng, 20, 18);
  EXPECT_NEAR(photometric_loss(a, a, 0.2).loss, 0.0, 1e-9);
}

TEST(Loss, PureL1OnConstantOffset) {
  const ImageF a(12, 12, 3, 0.4), b(12, 12, 3, 0.5);
  EXPECT_NEAR(photometric_loss(a, b, 0.0).loss, 0.1, 1e-12);
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  Rng rng(2);
  const ImageF a = oracle::random_image(rng, 14, 12);
  const ImageF b = oracle::random_image(rng, 14, 12);
  const auto r = photometric_loss(a, b, 0.2);
  const double h = 1e-6;
  for (size_t i = 0; i < a.size(); i += 7) {
    ImageF p = a, m = a;
    p.data()[i] += h;
    m.data()[i] -= h;
    const double fd = (photometric_loss(p, b, 0.2).loss - photometric_loss(m, b, 0.2).loss) / (2 * h);
    EXPECT_LE(std::abs(r.grad.data()[i] - fd), 1e-6 * 1e-3 + 1e-3 * std::abs(fd)) << i;
  }
}

TEST(Ssim, SelfAndSymmetry) {
  Rng rng(3);
  const ImageF a = oracle::random_image(rng, 16, 16);
  const ImageF b = oracle::random_image(rng, 16, 16);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
}

TEST(Ssim, MatchesSlidingWindowReference) {
  Rng rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    const ImageF a = oracle::random_image(rng, 16, 16);
    const ImageF b = oracle::random_image(rng, 16, 16);
    EXPECT_NEAR(ssim(a, b), oracle::naive_ssim(a, b), 1e-6);
  }
}

TEST(Ssim, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  const ImageF a = oracle::random_image(rng, 16, 16);
  const ImageF b = oracle::random_image(rng, 16, 16);
  ImageF grad;
  ssim_with_grad(a, b, grad);
  const double h = 1e-5;
  for (size_t i = 0; i < a.size(); i += 5) {
    ImageF p = a, m = a;
    p.data()[i] += h;
    m.data()[i] -= h;
    const double fd = (ssim(p, b) - ssim(m, b)) / (2 * h);
    EXPECT_LE(std::abs(grad.data()[i] - fd), 1e-9 + 1e-3 * std::abs(fd)) << i;
  }
}

TEST(Adam, ZeroGradientKeepsParams) {
  std::vector<double> p{1.0, -2.0, 3.5};
  const std::vector<double> g(3, 0.0);
  AdamState s(3);
  adam_step(p, g, s, 0.1);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.5}));
}

TEST(Adam, FirstStepIsSignTimesRate) {
  std::vector<double> p{1.0, -2.0, 3.5};
  const std::vector<double> g{0.3, -4.0, 1e-3};
  AdamState s(3);
  adam_step(p, g, s, 0.01);
  EXPECT_NEAR(p[0], 1.0 - 0.01, 1e-12);
  EXPECT_NEAR(p[1], -2.0 + 0.01, 1e-12);
  EXPECT_NEAR(p[2], 3.5 - 0.01, 1e-12);
}

TEST(Adam, MatchesScalarReference) {
  Rng rng(6);
  const size_t n = 8;
  std::vector<double> p(n), ref(n);
  for (size_t i = 0; i < n; ++i) ref[i] = p[i] = rng.normal();
  std::vector<oracle::ScalarAdam> scalar(n);
  AdamState s(n);
  for (int step = 0; step < 100; ++step) {
    std::vector<double> g(n);
    for (auto& v : g) v = rng.normal();
    adam_step(p, g, s, 1e-2);
    for (size_t i = 0; i < n; ++i) ref[i] = scalar[i].step(ref[i], g[i], 1e-2);
  }
  for (size_t i = 0; i < n; ++i) EXPECT_NEAR(p[i], ref[i], 1e-12);
  EXPECT_EQ(s.step, 100);
}

TEST(Densify, PrunesTransparent) {
  gs::GaussianCloud cloud;
  cloud.gaussians.emplace_back();
  cloud.gaussians[0].opacity_logit = gs::logit(0.001);
  const std::vector<double> g{0.0};
  DensifyConfig cfg;
  const auto r = densify_and_prune(cloud, g, cfg);
  EXPECT_TRUE(r.cloud.empty());
  EXPECT_EQ(r.n_pruned, 1u);
}

TEST(Densify, ZeroGradientsChangeNothing) {
  Rng rng(7);
  const auto cloud = oracle::random_scene(rng, 10, 1);
  const std::vector<double> g(10, 0.0);
  const auto r = densify_and_prune(cloud, g, DensifyConfig{});
  EXPECT_EQ(r.cloud, cloud);
  EXPECT_EQ(r.n_split + r.n_cloned, 0u);
  for (size_t i = 0; i < r.origin.size(); ++i) EXPECT_EQ(r.origin[i], static_cast<std::int64_t>(i));
}

TEST(Densify, SplitDoublesLargeAndClonesSmall) {
  gs::GaussianCloud cloud;
  cloud.sh_degree = 0;
  gs::Gaussian big, small;
  big.log_scale = Vec3(std::log(0.5), std::log(0.1), std::log(0.1));
  big.opacity_logit = 1.0;
  small.log_scale = Vec3::Constant(std::log(0.001));
  small.opacity_logit = 1.0;
  small.mean = Vec3(3, 0, 0);
  cloud.gaussians = {big, big, small};
  DensifyConfig cfg;
  cfg.scene_extent = 1.0;
  const std::vector<double> g{1.0, 1.0, 1.0};
  const auto r = densify_and_prune(cloud, g, cfg);
  EXPECT_EQ(r.n_split, 2u);
  EXPECT_EQ(r.n_cloned, 1u);
  ASSERT_EQ(r.cloud.size(), 2u + 4u);
  EXPECT_EQ(r.origin, (std::vector<std::int64_t>{2, -1, -1, -1, -1, -1}));
  const auto& child = r.cloud.gaussians[2];
  EXPECT_NEAR(std::abs(child.mean.x()), 0.25, 1e-12);
  EXPECT_NEAR(child.scale().x(), 0.5 / 1.6, 1e-12);
}

TEST(Tracker, KeepsMaximum) {
  BestCheckpointTracker t;
  gs::GaussianCloud c;
  t.offer(500, 20.0, 0.1, c);
  t.offer(1000, 25.0, 0.1, c);
  t.offer(1500, 22.0, 0.1, c);
  ASSERT_TRUE(t.best());
  EXPECT_EQ(t.best()->iteration, 1000);
  EXPECT_EQ(*t.best()->eval_psnr, 25.0);
}

TEST(Tracker, EarliestWinsTie) {
  BestCheckpointTracker t;
  gs::GaussianCloud c;
  t.offer(1, 30.0, 0.1, c);
  t.offer(2, 30.0, 0.1, c);
  EXPECT_EQ(t.best()->iteration, 1);
}

TEST(Trace, RejectsNonIncreasing) {
  LossTrace trace;
  trace.push({500, 0.1, 20.0});
  EXPECT_THROW(trace.push({500, 0.1, std::nullopt}), Error);
  trace.push({1000, 0.05, std::nullopt});
  EXPECT_EQ(trace.csv().substr(0, 19), "iteration,loss,psnr");
}

TEST(Checkpoint, SaveLoadRoundTrip) {
  Rng rng(8);
  Checkpoint cp;
  cp.cloud = oracle::random_scene(rng, 5, 1);
  cp.iteration = 1500;
  cp.train_loss = 0.0123;
  cp.eval_psnr = 31.5;
  const auto path = std::filesystem::temp_directory_path() / "shoesplat_ckpt_test" / "best.ply";
  std::filesystem::create_directories(path.parent_path());
  save_checkpoint(cp, path);
  const auto loaded = load_checkpoint(path);
  EXPECT_EQ(loaded.iteration, 1500);
  EXPECT_EQ(loaded.train_loss, 0.0123);
  EXPECT_EQ(loaded.eval_psnr, 31.5);
  EXPECT_EQ(loaded.cloud.size(), 5u);
  std::filesystem::remove_all(path.parent_path());
}

TEST(Config, Validation) {
  TrainConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.iterations = 10;
  cfg.lambda = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Train, GroundTruthIsFixedPoint) {
  synth::SynthConfig sc;
  sc.n_gaussians = 10;
  sc.n_views = 4;
  sc.width = sc.height = 48;
  sc.focal = 60;
  const auto scene = synth::generate(sc);
  // One exact rendering of the ground truth, used twice.
  View v = scene.views[0];
  v.image = raster::render(scene.ground_truth, v.camera, Vec3::Zero()).color;
  v.mask = MaskBuffer(v.image.width(), v.image.height(), 1, 1.0);
  const std::vector<View> views{v, v};

  TrainConfig cfg;
  cfg.iterations = 100;
  cfg.eval_interval = 1;
  cfg.densify_until = 0;
  const auto r = train::train(views, {}, scene.ground_truth, cfg);
  ASSERT_EQ(r.trace.samples.size(), 100u);
  EXPECT_NEAR(r.trace.samples.front().loss, 0.0, 1e-9);
  // Adam turns roundoff-sized gradients into full-rate steps, so the loss
  // wobbles but stays near zero.
  for (const auto& s : r.trace.samples) {
    EXPECT_LT(s.loss, 1e-3);
    EXPECT_GT(*s.psnr, 50.0);
  }
  EXPECT_LT(r.trace.samples.back().loss, 1e-4);
}

TEST(Train, RejectsSingleViewAndEmptyMask) {
  synth::SynthConfig sc;
  sc.n_views = 2;
  sc.width = sc.height = 32;
  const auto scene = synth::generate(sc);
  TrainConfig cfg;
  cfg.iterations = 1;
  EXPECT_THROW(train::train(std::span(scene.views).first(1), {}, scene.ground_truth, cfg), Error);
  auto views = scene.views;
  views[1].mask = MaskBuffer(32, 32, 1, 0.0);
  try {
    train::train(views, {}, scene.ground_truth, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyMask);
  }
}

TEST(Train, NonFiniteLossAborts) {
  synth::SynthConfig sc;
  sc.n_views = 2;
  sc.width = sc.height = 32;
  auto scene = synth::generate(sc);
  scene.views[0].image.data()[0] = std::nan("");
  scene.views[1].image.data()[0] = std::nan("");
  TrainConfig cfg;
  cfg.iterations = 2;
  try {
    train::train(scene.views, {}, scene.ground_truth, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteLoss);
  }
}

TEST(Train, LossFallsOverEachWindowOnSyntheticScenes) {
  // Median over seeds of the mean loss in each 500-step window of 2000 steps.
  std::vector<std::vector<double>> windows(4);
  for (std::uint64_t seed : {1, 2, 3}) {
    synth::SynthConfig sc;
    sc.seed = seed;
    sc.n_views = 12;
    sc.width = sc.height = 48;
    sc.focal = 56;
    const auto scene = synth::generate(sc);
    TrainConfig cfg;
    cfg.iterations = 2000;
    cfg.eval_interval = 500;
    gs::InitConfig ic;
    const auto init = gs::init_from_points(scene.reconstruction.points, ic);
    const auto r = train::train(scene.views, {}, init, cfg);
    ASSERT_EQ(r.trace.samples.size(), 4u);
    for (int w = 0; w < 4; ++w) windows[w].push_back(r.trace.samples[w].loss);
  }
  std::vector<double> median;
  for (auto& w : windows) {
    std::sort(w.begin(), w.end());
    median.push_back(w[1]);
  }
  for (int w = 1; w < 4; ++w) EXPECT_LT(median[w], median[w - 1]) << w;
}
