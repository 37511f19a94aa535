#pragma once

#include <numbers>
#include <vector>

#include "desctrack/geometry.hpp"
#include "desctrack/image.hpp"

namespace desctrack {

struct Keypoint {
  Point2 position;  ///< level-0 (full-resolution) coordinates
  int octave = 0;
  double response = 0.0;
  double orientation = 0.0;  ///< radians in (-pi, pi]
  double scale_factor = 1.0;  ///< pyramid_scale^octave

  /// Integer position on the keypoint's own pyramid level.
  int level_x() const;
  int level_y() const;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct DetectorConfig {
  int max_features = 2500;
  int octaves = 4;
  int fast_threshold = 20;
  int arc_length = 9;
  int nms_radius = 3;
  double pyramid_scale = std::numbers::sqrt2;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Keypoints closer than this to a level border are discarded; covers the
/// orientation patch and every extractor's sampling footprint.
inline constexpr int kKeypointBorder = 16;
inline constexpr int kOrientationPatchRadius = 15;
inline constexpr int kMinPyramidLevelSize = 32;

struct Corner {
  Point2 position;
  double response = 0.0;
  friend bool operator==(const Corner&, const Corner&) = default;
};

struct ImagePyramid {
  std::vector<GrayImage> levels;
  double scale = std::numbers::sqrt2;

  double level_scale(int level) const;
};

/// Level 0 is the input; every further level is the previous one blurred with
/// a 5-tap binomial kernel and bilinearly resampled by 1/scale. The octave
/// count is truncated so the smallest level stays at least 32x32. Throws
/// std::invalid_argument for images smaller than 32x32.
ImagePyramid build_pyramid(const GrayImage& img, int octaves, double scale);

/// Dimensions of every level build_pyramid would produce.
std::vector<std::pair<int, int>> pyramid_dimensions(int width, int height, int octaves,
                                                    double scale);

/// The 16-pixel Bresenham circle of radius 3, clockwise from 12 o'clock.
inline constexpr int kCircleOffsets[16][2] = {
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},  {3, 1},  {2, 2},  {1, 3},
    {0, 3},  {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

/// Segment test: a pixel is a corner when at least `arc_length` contiguous
/// circle pixels are all brighter than I(p) + threshold or all darker than
/// I(p) - threshold. The response is the sum of |I(c) - I(p)| over the
/// qualifying arc. Only pixels whose whole circle lies inside are tested.
/// Output is in raster order.
std::vector<Corner> fast_detect(const GrayImage& img, int threshold, int arc_length);

/// Keeps a candidate when no other candidate within Chebyshev distance `radius`
/// beats it. Equal responses are resolved in favour of the lower (y, x).
std::vector<Corner> nonmax_suppress(const std::vector<Corner>& candidates, int radius);

/// atan2(m01, m10) over the disc of `patch_radius` around the rounded position.
/// Returns 0 when both moments vanish.
double orientation_intensity_centroid(const GrayImage& img, Point2 p,
                                      int patch_radius = kOrientationPatchRadius);

/// Per-level segment test + NMS, orientation on the detection level, border
/// discard, then the global top `max_features` by response with ties ordered
/// by (octave, y, x).
std::vector<Keypoint> detect_multiscale(const ImagePyramid& pyramid, const DetectorConfig& cfg);
std::vector<Keypoint> detect_multiscale(const GrayImage& img, const DetectorConfig& cfg);

}  // namespace desctrack
