#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "desctrack/geometry.hpp"
#include "desctrack/image.hpp"

namespace desctrack {

/// Frames plus one ground-truth box per frame. At least two frames.
class Sequence {
 public:
  Sequence(std::string name, std::vector<GrayImage> frames, std::vector<OrientedBox> ground_truth);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return frames_.size(); }
  const std::vector<GrayImage>& frames() const noexcept { return frames_; }
  const std::vector<OrientedBox>& ground_truth() const noexcept { return ground_truth_; }

  /// 0-based access; reports use 1-based frame numbers.
  const GrayImage& frame(std::size_t i) const { return frames_.at(i); }
  const OrientedBox& box(std::size_t i) const { return ground_truth_.at(i); }

 private:
  std::string name_;
  std::vector<GrayImage> frames_;
  std::vector<OrientedBox> ground_truth_;
};

inline constexpr std::string_view kGroundTruthFile = "groundtruth.txt";

/// Parses rows of 8 reals (vertex pairs) separated by whitespace or commas.
/// Blank lines and lines starting with '#' are skipped. Throws ParseError with
/// the 1-based line number for arity or numeric errors and for degenerate quads.
std::vector<OrientedBox> parse_ground_truth(std::string_view text);

/// Like parse_ground_truth, but a row of eight "nan" tokens yields nullopt.
std::vector<std::optional<OrientedBox>> parse_box_rows(std::string_view text);

/// One row per box, eight values, 12 significant digits. Absent boxes become
/// a row of "nan".
std::string serialize_boxes(const std::vector<std::optional<OrientedBox>>& boxes);
std::string serialize_ground_truth(const std::vector<OrientedBox>& boxes);

/// Decodes an 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or a binary
/// P5 PGM. Colour is converted with round(0.299 R + 0.587 G + 0.114 B).
GrayImage read_image(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);
void write_png(const GrayImage& img, const std::filesystem::path& path);

/// Luma used for colour inputs.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Loads `directory`: every *.png / *.pgm file in lexicographic order, plus
/// groundtruth.txt. The sequence name is the directory's final component.
Sequence load_sequence(const std::filesystem::path& directory);

/// Writes frames as frame_NNNN.pgm plus groundtruth.txt so that
/// load_sequence round-trips the sequence.
void save_sequence(const Sequence& seq, const std::filesystem::path& directory);

/// Inclusive, 1-based frame range.
struct FrameRange {
  std::size_t first = 0;
  std::size_t last = 0;
  bool contains(std::size_t frame) const noexcept { return frame >= first && frame <= last; }
};

struct SynthesisConfig {
  std::string name = "synthetic";
  int width = 640;
  int height = 480;
  std::size_t frame_count = 2;
  /// Object rectangle size, centred on the object-local origin.
  double object_width = 160.0;
  double object_height = 120.0;
  /// Absolute object pose for every frame (object-local -> image).
  std::vector<SimilarityTransform> motion;
  std::uint64_t texture_seed = 0;
  /// Cell sizes of the piecewise-constant (corner-producing) and the smooth
  /// value-noise layers, in pixels.
  double block_cell = 8.0;
  double smooth_cell = 32.0;
  double noise_sigma = 0.0;
  std::optional<FrameRange> occlusion_frames;
};

/// Renders a seeded textured rectangle over a different static texture, one
/// frame per pose in `cfg.motion`, with optional Gaussian noise. Frames inside
/// `occlusion_frames` show the background only. Throws DataError naming the
/// frame if the transformed object leaves the image.
Sequence generate_synthetic(const SynthesisConfig& cfg);

/// Ready-made configurations: "translation", "rotscale", "occlusion".
/// `resolution_scale` shrinks or enlarges every spatial quantity so the same
/// content is rendered at a different resolution (0.5 gives 320x240).
SynthesisConfig synthesis_preset(std::string_view preset, std::uint64_t seed,
                                 double resolution_scale = 1.0);
std::vector<std::string> synthesis_preset_names();

}  // namespace desctrack
