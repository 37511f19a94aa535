#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "desctrack/detection.hpp"
#include "desctrack/geometry.hpp"
#include "desctrack/matching.hpp"

namespace desctrack {

/// Outcome of one match between a first-frame keypoint and a current one.
/// Background-to-background matches are Unlabeled.
enum class MatchLabel { TruePositive, FalsePositive, FalseNegative, Unlabeled };

const char* to_string(MatchLabel label);

struct FrameMatchStats {
  std::size_t frame = 0;  ///< 1-based
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t unlabeled = 0;
  std::size_t ttp = 0;  ///< true positives that also pass the ratio test
  std::size_t total_keypoints = 0;
  std::size_t object_keypoints = 0;

  /// tp / (tp + fp + fn), 0 when nothing is labeled.
  double tp_ratio() const;
  double fp_ratio() const;
  friend bool operator==(const FrameMatchStats&, const FrameMatchStats&) = default;
};

struct SequenceMatchStats {
  std::size_t frames = 0;
  double mean_tp = 0, mean_fp = 0, mean_fn = 0, mean_unlabeled = 0, mean_ttp = 0;
  double mean_total_keypoints = 0, mean_object_keypoints = 0;
  /// Per-frame ratios averaged over frames.
  double mean_tp_ratio = 0, mean_fp_ratio = 0, mean_ttp_ratio = 0;
};

struct EvalConfig {
  std::vector<double> upsilon_levels{0.25, 0.5, 0.75};
  /// Throws ConfigError unless levels are strictly increasing inside (0, 1).
  void validate() const;
};

/// Labels every match: query indices refer to `first_keypoints` (frame 1),
/// train indices to `current_keypoints`. Throws std::out_of_range for bad
/// indices.
std::vector<MatchLabel> label_matches(std::span<const MatchRecord> matches,
                                      std::span<const Keypoint> first_keypoints,
                                      std::span<const Keypoint> current_keypoints,
                                      const OrientedBox& first_box,
                                      const OrientedBox& current_box);

FrameMatchStats frame_stats(std::size_t frame, std::span<const MatchLabel> labels,
                            std::span<const MatchRecord> matches,
                            std::span<const Keypoint> current_keypoints,
                            const OrientedBox& current_box);

/// Throws std::invalid_argument for an empty input.
SequenceMatchStats sequence_stats(std::span<const FrameMatchStats> per_frame);

/// (upsilon, fraction of overlaps strictly above it) for every level.
std::vector<std::pair<double, double>> success_rates(std::span<const double> overlaps,
                                                     const EvalConfig& cfg = {});

struct CorrelationMatrix {
  std::vector<std::string> names;
  /// Row-major K x K.
  std::vector<double> values;
  /// Measures with zero variance; their off-diagonal entries are 0.
  std::vector<bool> zero_variance;

  std::size_t size() const { return names.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
};

struct NamedMeasure {
  std::string name;
  std::vector<double> values;
};

/// Pearson correlation between every pair of measures. All vectors must have
/// the same length N >= 2 (std::invalid_argument otherwise).
CorrelationMatrix correlation_matrix(std::span<const NamedMeasure> measures);

}  // namespace desctrack
