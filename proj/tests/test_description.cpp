#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "desctrack/brief_pattern.hpp"
#include "desctrack/dataset.hpp"
#include "desctrack/description.hpp"
#include "desctrack/errors.hpp"
#include "desctrack/matching.hpp"
#include "oracles.hpp"

using namespace desctrack;

namespace {

Keypoint keypoint_at(double x, double y, double orientation = 0.0) {
  Keypoint k;
  k.position = {x, y};
  k.orientation = orientation;
  return k;
}

/// Rotates `img` by `angle` about (cx, cy) with bilinear sampling.
GrayImage rotate(const GrayImage& img, double angle, double cx, double cy) {
  GrayImage out(img.width(), img.height());
  const double c = std::cos(angle), s = std::sin(angle);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx, dy = y - cy;
      out.at(x, y) = saturate_u8(img.bilinear(cx + c * dx + s * dy, cy - s * dx + c * dy));
    }
  }
  return out;
}

int box5(const GrayImage& img, int x, int y) {
  int s = 0;
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) s += img.at(x + dx, y + dy);
  }
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(BriefPattern, TableIsInsidePatch) {
  for (const auto& p : kBriefPattern) {
    for (int k = 0; k < 4; ++k) EXPECT_LE(std::abs(p[k]), 13);
    EXPECT_LE(p[0] * p[0] + p[1] * p[1], 13 * 13 + 1);
  }
}

TEST(Brief, MatchesDirectComparisonAtZeroOrientation) {
  const GrayImage img = oracle::smooth_texture(64, 64, 1);
  OrientedBriefExtractor ex;
  const auto set = ex.extract(img, std::vector{keypoint_at(32, 32)});
  ASSERT_EQ(set.size(), 1u);
  const auto& d = set.binary()[0];
  for (std::size_t i = 0; i < 256; ++i) {
    const auto& p = kBriefPattern[i];
    const bool expected = box5(img, 32 + p[0], 32 + p[1]) < box5(img, 32 + p[2], 32 + p[3]);
    EXPECT_EQ(d.bit(i), expected) << i;
  }
}

TEST(Brief, SameKeypointTwiceIsIdentical) {
  const GrayImage img = oracle::random_blocks(64, 64, 2, 3);
  OrientedBriefExtractor ex;
  const auto k = keypoint_at(30, 31, 0.7);
  const auto set = ex.extract(img, std::vector{k, k});
  EXPECT_EQ(hamming_distance(set.binary()[0], set.binary()[1]), 0);
}

TEST(Brief, PhotometricInversionFlipsEveryUntiedBit) {
  const GrayImage img = oracle::smooth_texture(64, 64, 3);
  GrayImage inv(64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) inv.at(x, y) = static_cast<std::uint8_t>(255 - img.at(x, y));
  }
  int ties = 0;
  for (const auto& p : kBriefPattern) ties += box5(img, 32 + p[0], 32 + p[1]) == box5(img, 32 + p[2], 32 + p[3]);
  OrientedBriefExtractor ex;
  const auto k = std::vector{keypoint_at(32, 32)};
  const auto a = ex.extract(img, k);
  const auto b = ex.extract(inv, k);
  EXPECT_EQ(hamming_distance(a.binary()[0], b.binary()[0]), 256 - ties);
  EXPECT_LT(ties, 8);
}

TEST(Brief, TwelveDegreeRotationStaysClose) {
  int worst = 0;
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const GrayImage img = oracle::smooth_texture(96, 96, seed);
    const double step = 2.0 * std::numbers::pi / 30.0;
    const GrayImage rot = rotate(img, step, 48, 48);
    OrientedBriefExtractor ex;
    const auto a = ex.extract(img, std::vector{keypoint_at(48, 48, 0.0)});
    const auto b = ex.extract(rot, std::vector{keypoint_at(48, 48, step)});
    worst = std::max(worst, hamming_distance(a.binary()[0], b.binary()[0]));
  }
  EXPECT_LE(worst, 40);
}

TEST(Brief, AngleBins) {
  EXPECT_EQ(OrientedBriefExtractor::angle_bin(0.0), 0);
  EXPECT_EQ(OrientedBriefExtractor::angle_bin(2.0 * std::numbers::pi / 30.0), 1);
  EXPECT_EQ(OrientedBriefExtractor::angle_bin(-2.0 * std::numbers::pi / 30.0), 29);
  EXPECT_EQ(OrientedBriefExtractor::angle_bin(std::numbers::pi), 15);
}

TEST(Brief, BorderKeypointsAreDroppedInOrder) {
  const GrayImage img = oracle::random_blocks(64, 64, 4, 3);
  OrientedBriefExtractor ex;
  const std::vector<Keypoint> kps = {keypoint_at(30, 30), keypoint_at(5, 30), keypoint_at(33, 34),
                                     keypoint_at(30, 60)};
  const auto set = ex.extract(img, kps);
  EXPECT_EQ(set.dropped, 2u);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.keypoints[0], kps[0]);
  EXPECT_EQ(set.keypoints[1], kps[2]);
  EXPECT_EQ(set.binary().size(), set.keypoints.size());
}

TEST(GradHist, FlatPatchIsFlagged) {
  GradientHistogramExtractor ex;
  const auto set = ex.extract(GrayImage(64, 64, 90), std::vector{keypoint_at(32, 32)});
  ASSERT_EQ(set.size(), 1u);
  EXPECT_TRUE(set.floats()[0].flat);
  for (const float v : set.floats()[0].values) EXPECT_EQ(v, 0.0f);
}

TEST(GradHist, UnitNormClampedAndDeterministic) {
  const GrayImage img = oracle::random_blocks(96, 96, 6, 3);
  GradientHistogramExtractor ex;
  std::vector<Keypoint> kps;
  for (int i = 0; i < 20; ++i) kps.push_back(keypoint_at(30 + i * 2, 40 + i, 0.3 * i));
  const auto a = ex.extract(img, kps);
  const auto b = ex.extract(img, kps);
  ASSERT_EQ(a.size(), kps.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.floats()[i], b.floats()[i]);
    ASSERT_FALSE(a.floats()[i].flat);
    double n = 0.0;
    for (const float v : a.floats()[i].values) {
      n += double(v) * v;
      EXPECT_GE(v, 0.0f);
    }
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
  }
  EXPECT_EQ(l2_distance(a.floats()[0], b.floats()[0]), 0.0);
}

TEST(GradHist, NinetyDegreeRotation) {
  double worst = 0.0;
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const GrayImage img = oracle::smooth_texture(64, 64, seed);
    // Exact pixel rotation by +90 degrees about (32, 32).
    GrayImage rot(64, 64);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) rot.at(x, y) = img.clamped(32 + (y - 32), 32 - (x - 32));
    }
    GradientHistogramExtractor ex;
    const auto a = ex.extract(img, std::vector{keypoint_at(32, 32, 0.0)});
    const auto b = ex.extract(rot, std::vector{keypoint_at(32, 32, std::numbers::pi / 2)});
    worst = std::max(worst, l2_distance(a.floats()[0], b.floats()[0]));
  }
  EXPECT_LE(worst, 0.35);
}

TEST(DescriptorSet, KindAccessorsAndSelect) {
  const auto set = DescriptorSet::make_binary({keypoint_at(1, 1), keypoint_at(2, 2)},
                                              {BinaryDescriptor{}, BinaryDescriptor{{1, 0, 0, 0}}});
  EXPECT_EQ(set.kind(), DescriptorKind::Binary);
  EXPECT_THROW(set.floats(), std::invalid_argument);
  const std::vector<std::size_t> pick = {1};
  const auto sub = set.select(pick);
  ASSERT_EQ(sub.size(), 1u);
  EXPECT_EQ(sub.binary()[0].words[0], 1u);
  EXPECT_THROW(DescriptorSet::make_float({keypoint_at(1, 1)}, {}), std::invalid_argument);
}

TEST(Registry, BuiltinsAndPlugins) {
  const auto names = extractor_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "binary256"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "gradhist64"), names.end());
  try {
    make_extractor("surf");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("binary256"), std::string::npos);
  }

  // A plug-in reusing the binary pipeline under another name.
  class Renamed : public DescriptorExtractor {
   public:
    std::string name() const override { return "renamed"; }
    DescriptorKind kind() const override { return DescriptorKind::Binary; }
    using DescriptorExtractor::extract;
    DescriptorSet extract(const ImagePyramid& p, std::span<const Keypoint> k) const override {
      return inner.extract(p, k);
    }
    OrientedBriefExtractor inner;
  };
  register_extractor("renamed", [] { return std::make_unique<Renamed>(); });
  const auto ex = make_extractor("renamed");
  EXPECT_EQ(ex->name(), "renamed");
  const GrayImage img = oracle::random_blocks(64, 64, 9, 3);
  EXPECT_EQ(ex->extract(img, std::vector{keypoint_at(32, 32)}).binary(),
            OrientedBriefExtractor{}.extract(img, std::vector{keypoint_at(32, 32)}).binary());
}

TEST(Extractor, PyramidAndImageOverloadsAgree) {
  const GrayImage img = oracle::random_blocks(160, 120, 12, 3);
  OrientedBriefExtractor ex;
  const DetectorConfig cfg;
  const auto pyr = build_pyramid(img, cfg.octaves, cfg.pyramid_scale);
  const auto kps = ex.detect(pyr, cfg);
  ASSERT_FALSE(kps.empty());
  EXPECT_EQ(kps, ex.detect(img, cfg));
  EXPECT_EQ(ex.extract(pyr, kps).binary(), ex.extract(img, kps).binary());
}

TEST(DescriptionProperty, CorrespondingKeypointsAreCloser) {
  auto cfg = synthesis_preset("translation", 7);
  cfg.frame_count = 2;
  cfg.motion.resize(2);
  const Sequence seq = generate_synthetic(cfg);
  const Point2 shift = seq.box(1).centroid() - seq.box(0).centroid();
  OrientedBriefExtractor ex;
  const auto a = ex.extract(seq.frame(0), ex.detect(seq.frame(0), DetectorConfig{}));
  const auto b = ex.extract(seq.frame(1), ex.detect(seq.frame(1), DetectorConfig{}));
  std::vector<double> same, other;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!point_in_box(a.keypoints[i].position, seq.box(0))) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = hamming_distance(a.binary()[i], b.binary()[j]);
      if (distance(a.keypoints[i].position + shift, b.keypoints[j].position) < 1.0 &&
          a.keypoints[i].octave == b.keypoints[j].octave) {
        same.push_back(d);
      } else if (j % 7 == 0) {
        other.push_back(d);
      }
    }
  }
  ASSERT_GT(same.size(), 20u);
  EXPECT_LT(median(same), median(other));
}
