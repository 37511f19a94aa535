#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "desctrack/dataset.hpp"
#include "desctrack/description.hpp"
#include "desctrack/evaluation.hpp"
#include "desctrack/run_config.hpp"
#include "desctrack/tracker.hpp"

namespace desctrack {

inline constexpr const char* kReportSchema = "desctrack-report/1";

struct StageTiming {
  std::size_t frame = 0;  ///< 1-based
  double detect_ms = 0.0;
  double extract_ms = 0.0;
  double match_ms = 0.0;
  double track_ms = 0.0;
  double total_ms = 0.0;
  std::size_t keypoint_count = 0;
  int width = 0;
  int height = 0;
};

struct TimedRun {
  TrackingResult tracking;
  std::vector<StageTiming> timings;  ///< one per frame
};

/// run_sequence with per-stage wall-clock timings (monotonic clock, frames
/// already decoded).
TimedRun timed_run(const Sequence& seq, const DescriptorExtractor& extractor, const RunConfig& cfg);

struct StageStat {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased; 0 for a single sample
  double min = 0.0;
  double max = 0.0;
};

struct TimingAggregate {
  int width = 0;
  int height = 0;
  std::size_t samples = 0;
  bool single_sample = false;
  StageStat detect, extract, match, track, total;
};

struct TimingGroup {
  int width = 0;
  int height = 0;
  std::vector<StageTiming> samples;
};

std::vector<TimingGroup> group_by_resolution(const std::vector<StageTiming>& timings);

/// Mean and unbiased variance per stage. Empty groups are skipped and noted in
/// `warnings` when provided.
std::vector<TimingAggregate> aggregate_timings(const std::vector<TimingGroup>& groups,
                                               std::vector<std::string>* warnings = nullptr);

StageStat stage_stat(const std::vector<double>& samples);

struct FrameOverlap {
  std::size_t frame = 0;
  double overlap = 0.0;  ///< 0 for absent boxes
  bool lost = false;
};

struct SequenceReport {
  std::string name;
  int width = 0;
  int height = 0;
  std::size_t frames = 0;
  bool untrackable = false;
  std::string error;
  /// Frames 2..n when distinctiveness was evaluated.
  std::vector<FrameMatchStats> match_stats;
  std::optional<SequenceMatchStats> match_summary;
  std::vector<FrameOverlap> overlaps;  ///< frames 1..n
  std::vector<std::pair<double, double>> success_rates;  ///< over frames 2..n
  std::vector<StageTiming> timings;  ///< frames 1..n
  std::optional<CorrelationMatrix> correlation;  ///< per-frame measures
  std::vector<std::optional<OrientedBox>> boxes;
};

struct BenchmarkReport {
  std::string schema = kReportSchema;
  std::string tool_version;
  std::string descriptor;
  std::string mode = "run";  ///< "run" or "profile"
  std::vector<std::pair<std::string, std::string>> config;
  std::size_t jobs = 1;
  std::size_t hardware_threads = 0;
  std::uint64_t ransac_seed = 0;
  std::vector<SequenceReport> sequences;
  std::vector<TimingAggregate> timing_summary;
  /// Across sequences; present with two or more tracked sequences.
  std::optional<CorrelationMatrix> correlation;
};

/// Distinctiveness pass: full-frame keypoints of frame 1 matched
/// against every later frame and labelled with the ground truth boxes.
std::vector<FrameMatchStats> evaluate_distinctiveness(const Sequence& seq,
                                                      const DescriptorExtractor& extractor,
                                                      const RunConfig& cfg);

struct BenchmarkOptions {
  bool distinctiveness = true;
  std::size_t jobs = 1;
};

SequenceReport benchmark_sequence(const Sequence& seq, const DescriptorExtractor& extractor,
                                  const RunConfig& cfg, bool distinctiveness);

/// Benchmarks every sequence with a fresh extractor per worker.
BenchmarkReport run_benchmark(const std::vector<Sequence>& sequences,
                              const std::string& descriptor, const RunConfig& cfg,
                              const BenchmarkOptions& options);

/// Directories holding groundtruth.txt: `root` itself, or its subdirectories.
std::vector<std::filesystem::path> find_sequence_dirs(const std::filesystem::path& root);

nlohmann::json to_json(const BenchmarkReport& report);
BenchmarkReport report_from_json(const nlohmann::json& j);

/// Structural problems in a report document; empty means valid.
std::vector<std::string> validate_report_json(const nlohmann::json& j);

enum class ReportFormat { Json, Csv };

/// JSON: `report.json`. CSV: match_stats, overlaps, success_rates, timings,
/// timing_summary and correlations tables. Both formats also write
/// boxes/<sequence>.txt. Throws std::invalid_argument for a report without
/// sequences before touching the filesystem, IoError for unwritable paths.
std::vector<std::filesystem::path> emit_report(const BenchmarkReport& report, ReportFormat format,
                                               const std::filesystem::path& dir);

/// Rounds to 6 significant digits, the precision used in emitted reports.
double round_sig6(double v);

}  // namespace desctrack
