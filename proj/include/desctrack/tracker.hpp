#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "desctrack/dataset.hpp"
#include "desctrack/description.hpp"
#include "desctrack/errors.hpp"
#include "desctrack/geometry.hpp"
#include "desctrack/matching.hpp"

namespace desctrack {

struct TrackerConfig {
  double fb_error_threshold = 1.0;
  int lk_window = 21;
  int lk_pyramid_levels = 3;
  int lk_max_iters = 30;
  double lk_epsilon = 0.01;
  /// Points whose normalized structure tensor has a smaller eigenvalue are lost.
  double lk_min_eigenvalue = 1e-4;
  int min_inliers = 4;
  int ransac_iters = 200;
  double ransac_inlier_px = 3.0;
  std::uint64_t ransac_seed = 0;
  /// Re-detection region around the predicted box while tracking.
  double search_inflation = 1.5;
  /// Gated descriptor matches a flow-based pose needs to be accepted; 0 trusts
  /// flow alone.
  int min_match_support = 4;

  DetectorConfig detector;
  MatcherConfig matcher;

  void validate() const;
};

class TrackerInitError : public Error {
 public:
  using Error::Error;
};

/// Pyramidal Lucas-Kanade for every point of `prev`. nullopt marks a lost
/// point: it left the frame, its window is ill-conditioned, or the
/// forward-backward error exceeds the threshold. Throws std::invalid_argument
/// when the frames differ in size.
std::vector<std::optional<Point2>> lk_track_points(const GrayImage& prev, const GrayImage& next,
                                                   std::span<const Point2> points,
                                                   const TrackerConfig& cfg);

struct Correspondence {
  Point2 model;
  Point2 image;
};

struct PoseEstimate {
  bool ok = false;
  SimilarityTransform transform;
  /// Indices into the correspondence list, ascending.
  std::vector<std::size_t> inliers;
};

/// Closed-form least-squares similarity mapping `model` onto `image` points.
/// Requires two or more distinct model points.
std::optional<SimilarityTransform> fit_similarity(std::span<const Correspondence> pairs);

/// Seeded two-point RANSAC followed by a least-squares refit on the best
/// consensus set. Fewer than min_inliers inputs or inliers yields ok == false.
PoseEstimate estimate_pose(std::span<const Correspondence> correspondences,
                           const TrackerConfig& cfg);

struct TrackPoint {
  Point2 position;
  std::size_t model_idx = 0;
  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

struct TrackState {
  /// First-frame keypoints inside the initial box, with descriptors.
  DescriptorSet model;
  /// Model keypoints relative to the initial box centroid (image axes).
  std::vector<Point2> model_points;
  OrientedBox model_box = OrientedBox::axis_aligned(0, 0, 1, 1);
  std::vector<TrackPoint> current_points;
  std::optional<OrientedBox> current_box;
  /// Model-local to image transform of the last successful frame.
  SimilarityTransform pose;
  std::size_t frame_idx = 1;
  bool lost = false;
  GrayImage previous_frame;
};

/// Wall-clock split of one frame. total_ms also covers bookkeeping.
struct StageTimes {
  double detect_ms = 0.0;
  double extract_ms = 0.0;
  double match_ms = 0.0;
  double track_ms = 0.0;
  double total_ms = 0.0;
  std::size_t keypoint_count = 0;
};

/// Throws TrackerInitError when fewer than min_inliers keypoints fall in `b1`.
TrackState tracker_init(const GrayImage& img, const OrientedBox& b1,
                        const DescriptorExtractor& extractor, const TrackerConfig& cfg,
                        StageTimes* times = nullptr);

struct StepOutput {
  TrackState state;
  std::optional<OrientedBox> box;
  StageTimes times;
};

/// One iteration: flow, pose from flow, re-detection and model matching, merge.
/// A lost state skips flow and searches the whole frame.
StepOutput tracker_step(const TrackState& state, const GrayImage& next,
                        const DescriptorExtractor& extractor, const TrackerConfig& cfg);

struct TrackingResult {
  /// One entry per frame; frame 1 holds the initial box.
  std::vector<std::optional<OrientedBox>> boxes;
  std::vector<StageTimes> times;
  std::vector<bool> lost;
  bool untrackable = false;
  std::string error;
};

TrackingResult run_sequence(const Sequence& seq, const DescriptorExtractor& extractor,
                            const TrackerConfig& cfg);

}  // namespace desctrack
