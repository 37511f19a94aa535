#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "desctrack/dataset.hpp"
#include "desctrack/errors.hpp"

using namespace desctrack;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("desctrack_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

SynthesisConfig small_config(std::size_t frames) {
  SynthesisConfig c;
  c.name = "small";
  c.width = 96;
  c.height = 72;
  c.frame_count = frames;
  c.object_width = 32;
  c.object_height = 24;
  c.texture_seed = 3;
  for (std::size_t i = 0; i < frames; ++i) {
    c.motion.push_back(SimilarityTransform::make(1.0, 0.0, {40.0 + double(i), 36.0}));
  }
  return c;
}

}  // namespace

TEST(GroundTruth, ParsesSeparatorsCommentsAndBlankLines) {
  const auto boxes = parse_ground_truth(
      "# x1 y1 ... x4 y4\n"
      "0 0 10 0 10 5 0 5\n"
      "\n"
      "1,1,11,1,11,6,1,6\n"
      "2\t2  12 2 12 7 2 7\r\n");
  ASSERT_EQ(boxes.size(), 3u);
  EXPECT_NEAR(box_area(boxes[0]), 50.0, 1e-12);
  EXPECT_NEAR(boxes[2].centroid().x, 7.0, 1e-12);
}

TEST(GroundTruth, ArityErrorNamesLine) {
  try {
    parse_ground_truth("0 0 10 0 10 5 0 5\n0 0 10 0 10 5 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(GroundTruth, NonNumericAndDegenerateRows) {
  EXPECT_THROW(parse_ground_truth("0 0 10 0 ten 5 0 5\n"), ParseError);
  try {
    parse_ground_truth("\n# c\n0 0 0 0 0 0 0 0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(GroundTruth, SerializeRoundTrip) {
  const std::vector<OrientedBox> boxes = {OrientedBox::axis_aligned(0.25, 1, 10.5, 7),
                                          OrientedBox::axis_aligned(3, 4, 5, 6)};
  const auto back = parse_ground_truth(serialize_ground_truth(boxes));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t v = 0; v < 4; ++v) {
      EXPECT_NEAR(back[i][v].x, boxes[i][v].x, 1e-9);
      EXPECT_NEAR(back[i][v].y, boxes[i][v].y, 1e-9);
    }
  }
}

TEST(BoxRows, AbsentBoxesAreNanRows) {
  std::vector<std::optional<OrientedBox>> boxes = {OrientedBox::axis_aligned(0, 0, 2, 2), std::nullopt};
  const std::string text = serialize_boxes(boxes);
  EXPECT_NE(text.find("nan nan nan nan nan nan nan nan"), std::string::npos);
  const auto back = parse_box_rows(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(back[0].has_value());
  EXPECT_FALSE(back[1].has_value());
}

TEST(Luma, IntegerWeights) {
  EXPECT_EQ(luma(0, 0, 0), 0);
  EXPECT_EQ(luma(255, 255, 255), 255);
  EXPECT_EQ(luma(255, 0, 0), 76);
  EXPECT_EQ(luma(0, 255, 0), 150);
  EXPECT_EQ(luma(0, 0, 255), 29);
}

TEST(Images, PgmAndPngRoundTrip) {
  const fs::path dir = scratch("images");
  GrayImage img(5, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 5; ++x) img.at(x, y) = static_cast<std::uint8_t>(x * 40 + y * 7);
  }
  write_pgm(img, dir / "a.pgm");
  write_png(img, dir / "a.png");
  EXPECT_EQ(read_image(dir / "a.pgm"), img);
  EXPECT_EQ(read_image(dir / "a.png"), img);
}

TEST(Images, PgmWithComment) {
  const fs::path dir = scratch("pgmcomment");
  write(dir / "c.pgm", std::string("P5\n# made by hand\n2 1\n255\n") + char(10) + char(200));
  const GrayImage img = read_image(dir / "c.pgm");
  EXPECT_EQ(img.width(), 2);
  EXPECT_EQ(img.at(1, 0), 200);
}

TEST(Images, BadInputs) {
  const fs::path dir = scratch("badimg");
  EXPECT_THROW(read_image(dir / "missing.png"), IoError);
  write(dir / "bad.pgm", "P2\n1 1\n255\n0\n");
  EXPECT_THROW(read_image(dir / "bad.pgm"), DataError);
  write(dir / "trunc.pgm", "P5\n4 4\n255\nab");
  EXPECT_THROW(read_image(dir / "trunc.pgm"), DataError);
  write(dir / "x.bmp", "BM");
  EXPECT_THROW(read_image(dir / "x.bmp"), DataError);
}

TEST(Sequence, RejectsInconsistentInput) {
  const GrayImage f(8, 8);
  const auto b = OrientedBox::axis_aligned(1, 1, 4, 4);
  EXPECT_THROW(Sequence("s", {f}, {b}), DataError);
  EXPECT_THROW(Sequence("s", {f, f}, {b}), DataError);
  EXPECT_THROW(Sequence("s", {f, GrayImage(9, 8)}, {b, b}), DataError);
  EXPECT_NO_THROW(Sequence("s", {f, f}, {b, b}));
}

TEST(Sequence, SaveLoadRoundTrip) {
  const Sequence seq = generate_synthetic(small_config(4));
  const fs::path dir = scratch("seq") / "small";
  save_sequence(seq, dir);
  const Sequence back = load_sequence(dir);
  EXPECT_EQ(back.name(), "small");
  ASSERT_EQ(back.size(), 4u);
  EXPECT_EQ(back.frames(), seq.frames());
  EXPECT_NEAR(back.box(3).centroid().x, seq.box(3).centroid().x, 1e-9);
}

TEST(Sequence, LoadErrors) {
  const fs::path dir = scratch("seqerr");
  EXPECT_THROW(load_sequence(dir / "nope"), DataError);
  EXPECT_THROW(load_sequence(dir), DataError);  // no ground truth
  write_pgm(GrayImage(8, 8), dir / "0001.pgm");
  write_pgm(GrayImage(8, 8), dir / "0002.pgm");
  write(dir / "groundtruth.txt", "0 0 4 0 4 4 0 4\n");
  try {
    load_sequence(dir);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("groundtruth.txt"), std::string::npos);
  }
}

TEST(Synthesis, DeterministicAndSeedSensitive) {
  const auto a = generate_synthetic(small_config(3));
  const auto b = generate_synthetic(small_config(3));
  EXPECT_EQ(a.frames(), b.frames());
  auto cfg = small_config(3);
  cfg.texture_seed = 4;
  EXPECT_NE(generate_synthetic(cfg).frame(0), a.frame(0));
}

TEST(Synthesis, GroundTruthFollowsMotion) {
  const auto seq = generate_synthetic(small_config(3));
  EXPECT_NEAR(seq.box(0).centroid().x, 40.0, 1e-9);
  EXPECT_NEAR(seq.box(2).centroid().x, 42.0, 1e-9);
  EXPECT_NEAR(box_area(seq.box(1)), 32.0 * 24.0, 1e-6);
}

TEST(Synthesis, ObjectTextureMovesWithPose) {
  // Without noise, an integer shift of the pose shifts the object pixels.
  auto cfg = small_config(2);
  const auto seq = generate_synthetic(cfg);
  for (int y = 30; y < 42; ++y) {
    for (int x = 30; x < 48; ++x) EXPECT_EQ(seq.frame(0).at(x, y), seq.frame(1).at(x + 1, y));
  }
}

TEST(Synthesis, OcclusionShowsBackgroundOnly) {
  auto cfg = small_config(3);
  cfg.motion.assign(3, SimilarityTransform::make(1.0, 0.0, {40, 36}));
  cfg.occlusion_frames = FrameRange{2, 2};
  const auto seq = generate_synthetic(cfg);
  EXPECT_NE(seq.frame(0), seq.frame(1));
  EXPECT_EQ(seq.frame(0), seq.frame(2));
  // Outside the object the frames agree.
  EXPECT_EQ(seq.frame(0).at(2, 2), seq.frame(1).at(2, 2));
}

TEST(Synthesis, ObjectLeavingImageIsAnError) {
  auto cfg = small_config(2);
  cfg.motion[1] = SimilarityTransform::make(1.0, 0.0, {90, 36});
  try {
    generate_synthetic(cfg);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 2"), std::string::npos);
  }
}

TEST(Synthesis, PresetsAndScaling) {
  const auto t = synthesis_preset("translation", 7);
  EXPECT_EQ(t.frame_count, 200u);
  EXPECT_EQ(t.width, 640);
  EXPECT_EQ(t.height, 480);
  double peak = 0.0;
  for (std::size_t i = 1; i < t.motion.size(); ++i) {
    peak = std::max(peak, distance(t.motion[i].translation, t.motion[i - 1].translation));
  }
  EXPECT_LE(peak, 3.0);
  const auto half = synthesis_preset("translation", 7, 0.5);
  EXPECT_EQ(half.width, 320);
  EXPECT_EQ(half.height, 240);
  const auto occ = synthesis_preset("occlusion", 7);
  ASSERT_TRUE(occ.occlusion_frames.has_value());
  EXPECT_EQ(occ.occlusion_frames->first, 40u);
  EXPECT_EQ(occ.occlusion_frames->last, 49u);
  EXPECT_THROW(synthesis_preset("spiral", 7), std::invalid_argument);
  EXPECT_EQ(synthesis_preset_names().size(), 3u);
}
