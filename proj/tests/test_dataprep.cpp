#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "shoesplat/dataprep.hpp"

using namespace shoesplat;
using namespace shoesplat::prep;

namespace {

std::vector<std::string> video_names(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("shoe_" + std::to_string(i));
  return ids;
}

std::array<int, 3> counts(const std::map<std::string, Split>& m) {
  std::array<int, 3> c{};
  for (const auto& [id, s] : m) ++c[static_cast<int>(s)];
  return c;
}

}  // namespace

TEST(FrameSampling, Examples) {
  const auto idx = sample_frame_indices(900, 30);
  ASSERT_EQ(idx.size(), 30u);
  for (int i = 0; i < 30; ++i) EXPECT_EQ(idx[i], 30 * i);
  const auto all = sample_frame_indices(7, 7);
  for (int i = 0; i < 7; ++i) EXPECT_EQ(all[i], i);
  try {
    sample_frame_indices(10, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewFrames);
  }
}

TEST(FrameSampling, StrictlyIncreasing) {
  for (std::int64_t total = 1; total < 200; total += 7) {
    for (std::int64_t k = 1; k <= total; k += 5) {
      const auto idx = sample_frame_indices(total, k);
      for (size_t i = 1; i < idx.size(); ++i) EXPECT_LT(idx[i - 1], idx[i]);
    }
  }
}

TEST(Split, Counts) {
  EXPECT_EQ(counts(split_by_video(video_names(10), {}, 0)), (std::array<int, 3>{8, 1, 1}));
  EXPECT_EQ(counts(split_by_video(video_names(101), {}, 0)), (std::array<int, 3>{80, 10, 11}));
}

TEST(Split, OrderInvariantAndSeeded) {
  auto ids = video_names(40);
  const auto a = split_by_video(ids, {}, 5);
  Rng rng(9);
  rng.shuffle(ids);
  ids.push_back(ids.front());  // duplicates collapse
  EXPECT_EQ(split_by_video(ids, {}, 5), a);
  EXPECT_NE(split_by_video(ids, {}, 6), a);
}

TEST(Split, BadRatiosRejected) {
  SplitRatios r{0.5, 0.5, 0.5};
  EXPECT_THROW(r.validate(), Error);
  SplitRatios neg{1.2, -0.1, -0.1};
  EXPECT_THROW(neg.validate(), Error);
}

TEST(Mask, AllOnesAndAllZeros) {
  Rng rng(1);
  const ImageF img = oracle::random_image(rng, 8, 6);
  EXPECT_EQ(apply_mask(img, MaskBuffer(8, 6, 1, 1.0)), img);
  const ImageF bg = apply_mask(img, MaskBuffer(8, 6, 1, 0.0), {0.2, 0.4, 0.6});
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) {
      EXPECT_EQ(bg.at(x, y, 0), 0.2);
      EXPECT_EQ(bg.at(x, y, 2), 0.6);
    }
  }
}

TEST(Mask, CheckerboardMatchesDirectLoop) {
  Rng rng(2);
  const ImageF img = oracle::random_image(rng, 13, 11);
  MaskBuffer m(13, 11, 1);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 13; ++x) m.at(x, y) = (x + y) % 2 ? 1.0 : 0.0;
  }
  const ImageF out = apply_mask(img, m);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 13; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(x, y, c), (x + y) % 2 ? img.at(x, y, c) : 0.0);
    }
  }
  EXPECT_EQ(apply_mask(out, m), out);
}

TEST(Mask, DimensionMismatch) {
  EXPECT_THROW(apply_mask(ImageF(4, 4, 3), MaskBuffer(4, 5, 1)), Error);
}

TEST(Crop, Examples) {
  Rng rng(3);
  const ImageF sq = oracle::random_image(rng, 9, 9);
  EXPECT_EQ(crop_square(sq), sq);

  const ImageF wide = oracle::random_image(rng, 100, 60);
  const auto w = square_window(100, 60);
  EXPECT_EQ(w.x0, 20);
  EXPECT_EQ(w.y0, 0);
  EXPECT_EQ(w.side, 60);
  const ImageF c = crop_square(wide);
  EXPECT_EQ(c.width(), 60);
  EXPECT_EQ(c.at(0, 0, 1), wide.at(20, 0, 1));
  EXPECT_EQ(crop_square(c), c);

  geom::PinholeCamera cam;
  cam.cx = 50;
  cam.cy = 30;
  cam.width = 100;
  cam.height = 60;
  const auto cc = crop_camera(cam, w);
  EXPECT_EQ(cc.cx, 30.0);
  EXPECT_EQ(cc.cy, 30.0);
  EXPECT_EQ(cc.width, 60);
}

TEST(Crop, ReprojectionShiftsByOffset) {
  Rng rng(4);
  geom::PinholeCamera cam;
  cam.fx = cam.fy = 80;
  cam.cx = 64;
  cam.cy = 40;
  cam.width = 128;
  cam.height = 80;
  const auto w = square_window(128, 80);
  const auto cc = crop_camera(cam, w);
  for (int i = 0; i < 20; ++i) {
    const geom::Vec3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(2, 4));
    const auto a = geom::project(cam, p).pixel;
    const auto b = geom::project(cc, p).pixel;
    EXPECT_NEAR(b.x(), a.x() - w.x0, 1e-12);
    EXPECT_NEAR(b.y(), a.y() - w.y0, 1e-12);
  }
}

TEST(Manifest, CsvRoundTripAndValidation) {
  DatasetManifest m;
  m.entries.push_back({"shoe_a", 0, "images/a_0.png", "masks/a_0.png", Split::Train});
  m.entries.push_back({"shoe_a", 30, "images/a_30.png", "masks/a_30.png", Split::Train});
  m.entries.push_back({"shoe_b", 0, "images/b_0.png", "masks/b_0.png", Split::Test});
  m.validate();
  EXPECT_EQ(parse_manifest_csv(manifest_csv(m)), m);
  EXPECT_EQ(manifest_csv(m).substr(0, manifest_csv(m).find('\n')),
            "video_id,frame_index,image_path,mask_path,split");
  EXPECT_EQ(m.in_split(Split::Train).size(), 2u);

  auto dup = m;
  dup.entries.push_back(m.entries[0]);
  EXPECT_THROW(dup.validate(), Error);
  auto spread = m;
  spread.entries[1].split = Split::Val;
  EXPECT_THROW(spread.validate(), Error);
}

TEST(Manifest, VideoIds) {
  EXPECT_EQ(video_id_of("shoe_07/frame_0030.png"), "shoe_07");
  EXPECT_EQ(video_id_of("view_003.png"), "view_003");
}
