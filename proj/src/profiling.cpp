#include "desctrack/profiling.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "desctrack/detection.hpp"
#include "desctrack/errors.hpp"
#include "desctrack/matching.hpp"

#ifndef DESCTRACK_VERSION
#define DESCTRACK_VERSION "0.0.0"
#endif

namespace desctrack {

using nlohmann::json;

double round_sig6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

TimedRun timed_run(const Sequence& seq, const DescriptorExtractor& extractor, const RunConfig& cfg) {
  TimedRun out;
  out.tracking = run_sequence(seq, extractor, cfg.tracker);
  const int w = seq.frame(0).width();
  const int h = seq.frame(0).height();
  for (std::size_t i = 0; i < out.tracking.times.size(); ++i) {
    const StageTimes& t = out.tracking.times[i];
    StageTiming s;
    s.frame = i + 1;
    s.detect_ms = t.detect_ms;
    s.extract_ms = t.extract_ms;
    s.match_ms = t.match_ms;
    s.track_ms = t.track_ms;
    s.total_ms = t.total_ms;
    s.keypoint_count = t.keypoint_count;
    s.width = w;
    s.height = h;
    out.timings.push_back(s);
  }
  return out;
}

std::vector<TimingGroup> group_by_resolution(const std::vector<StageTiming>& timings) {
  std::map<std::pair<int, int>, std::vector<StageTiming>> groups;
  for (const auto& t : timings) groups[{t.width, t.height}].push_back(t);
  std::vector<TimingGroup> out;
  for (auto& [dims, samples] : groups) out.push_back({dims.first, dims.second, std::move(samples)});
  return out;
}

StageStat stage_stat(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("stage_stat: no samples");
  StageStat s;
  double sum = 0.0;
  s.min = samples.front();
  s.max = samples.front();
  for (const double v : samples) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  const double n = static_cast<double>(samples.size());
  s.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (const double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / (n - 1.0);
  }
  return s;
}

std::vector<TimingAggregate> aggregate_timings(const std::vector<TimingGroup>& groups,
                                               std::vector<std::string>* warnings) {
  std::vector<TimingAggregate> out;
  for (const auto& g : groups) {
    if (g.samples.empty()) {
      if (warnings) {
        warnings->push_back("timing group " + std::to_string(g.width) + "x" +
                            std::to_string(g.height) + " has no samples; skipped");
      }
      continue;
    }
    auto column = [&](double StageTiming::*m) {
      std::vector<double> v;
      v.reserve(g.samples.size());
      for (const auto& s : g.samples) v.push_back(s.*m);
      return stage_stat(v);
    };
    TimingAggregate a;
    a.width = g.width;
    a.height = g.height;
    a.samples = g.samples.size();
    a.single_sample = a.samples == 1;
    a.detect = column(&StageTiming::detect_ms);
    a.extract = column(&StageTiming::extract_ms);
    a.match = column(&StageTiming::match_ms);
    a.track = column(&StageTiming::track_ms);
    a.total = column(&StageTiming::total_ms);
    out.push_back(a);
  }
  return out;
}

std::vector<FrameMatchStats> evaluate_distinctiveness(const Sequence& seq,
                                                      const DescriptorExtractor& extractor,
                                                      const RunConfig& cfg) {
  const DetectorConfig& det = cfg.tracker.detector;
  auto describe = [&](const GrayImage& img) {
    const ImagePyramid pyr = build_pyramid(img, det.octaves, det.pyramid_scale);
    const auto kps = extractor.detect(pyr, det);
    return extractor.extract(pyr, kps);
  };
  const DescriptorSet first = describe(seq.frame(0));
  std::vector<FrameMatchStats> out;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const DescriptorSet current = describe(seq.frame(i));
    const auto matches = brute_force_match(first, current, cfg.tracker.matcher);
    const auto labels =
        label_matches(matches, first.keypoints, current.keypoints, seq.box(0), seq.box(i));
    out.push_back(frame_stats(i + 1, labels, matches, current.keypoints, seq.box(i)));
  }
  return out;
}

namespace {

CorrelationMatrix sequence_correlation(const SequenceReport& r) {
  // Deterministic per-frame measures over frames 2..n; timings are left out so
  // that reports stay reproducible.
  std::vector<NamedMeasure> m;
  NamedMeasure overlap{"overlap", {}}, keypoints{"keypoint_count", {}};
  for (std::size_t i = 1; i < r.overlaps.size(); ++i) {
    overlap.values.push_back(r.overlaps[i].overlap);
    keypoints.values.push_back(static_cast<double>(r.timings[i].keypoint_count));
  }
  if (!r.match_stats.empty()) {
    NamedMeasure tp{"tp", {}}, fp{"fp", {}}, fn{"fn", {}}, ttp{"ttp", {}}, ratio{"tp_ratio", {}};
    for (const auto& s : r.match_stats) {
      tp.values.push_back(static_cast<double>(s.tp));
      fp.values.push_back(static_cast<double>(s.fp));
      fn.values.push_back(static_cast<double>(s.fn));
      ttp.values.push_back(static_cast<double>(s.ttp));
      ratio.values.push_back(s.tp_ratio());
    }
    m = {tp, fp, fn, ttp, ratio};
  }
  m.push_back(overlap);
  m.push_back(keypoints);
  return correlation_matrix(m);
}

std::optional<CorrelationMatrix> cross_sequence_correlation(const std::vector<SequenceReport>& seqs) {
  std::vector<const SequenceReport*> tracked;
  for (const auto& s : seqs) {
    if (!s.untrackable) tracked.push_back(&s);
  }
  if (tracked.size() < 2) return std::nullopt;
  const bool with_matches = std::all_of(tracked.begin(), tracked.end(),
                                        [](const SequenceReport* s) { return s->match_summary.has_value(); });
  NamedMeasure overlap{"mean_overlap", {}}, success{"success_0.5", {}};
  NamedMeasure tp_ratio{"mean_tp_ratio", {}}, ttp_ratio{"mean_ttp_ratio", {}}, fp_ratio{"mean_fp_ratio", {}};
  for (const SequenceReport* s : tracked) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 1; i < s->overlaps.size(); ++i, ++n) sum += s->overlaps[i].overlap;
    overlap.values.push_back(n ? sum / static_cast<double>(n) : 0.0);
    const std::vector<double> ov = [&] {
      std::vector<double> v;
      for (std::size_t i = 1; i < s->overlaps.size(); ++i) v.push_back(s->overlaps[i].overlap);
      return v;
    }();
    success.values.push_back(success_rates(ov, EvalConfig{{0.5}}).front().second);
    if (with_matches) {
      tp_ratio.values.push_back(s->match_summary->mean_tp_ratio);
      ttp_ratio.values.push_back(s->match_summary->mean_ttp_ratio);
      fp_ratio.values.push_back(s->match_summary->mean_fp_ratio);
    }
  }
  std::vector<NamedMeasure> m;
  if (with_matches) m = {tp_ratio, ttp_ratio, fp_ratio};
  m.push_back(overlap);
  m.push_back(success);
  return correlation_matrix(m);
}

}  // namespace

SequenceReport benchmark_sequence(const Sequence& seq, const DescriptorExtractor& extractor,
                                  const RunConfig& cfg, bool distinctiveness) {
  SequenceReport r;
  r.name = seq.name();
  r.width = seq.frame(0).width();
  r.height = seq.frame(0).height();
  r.frames = seq.size();

  TimedRun run = timed_run(seq, extractor, cfg);
  r.untrackable = run.tracking.untrackable;
  r.error = run.tracking.error;
  r.timings = std::move(run.timings);
  r.boxes = run.tracking.boxes;

  std::vector<double> later;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    FrameOverlap fo;
    fo.frame = i + 1;
    fo.lost = i < run.tracking.lost.size() && run.tracking.lost[i];
    if (r.boxes[i]) fo.overlap = overlap(*r.boxes[i], seq.box(i));
    r.overlaps.push_back(fo);
    if (i > 0) later.push_back(fo.overlap);
  }
  r.success_rates = success_rates(later, cfg.eval);

  if (distinctiveness) {
    r.match_stats = evaluate_distinctiveness(seq, extractor, cfg);
    r.match_summary = sequence_stats(r.match_stats);
  }
  if (!r.untrackable && seq.size() >= 3) r.correlation = sequence_correlation(r);
  return r;
}

BenchmarkReport run_benchmark(const std::vector<Sequence>& sequences, const std::string& descriptor,
                              const RunConfig& cfg, const BenchmarkOptions& options) {
  cfg.validate();
  if (sequences.empty()) throw std::invalid_argument("run_benchmark: no sequences");
  // Fail on an unknown descriptor before spawning workers.
  (void)make_extractor(descriptor);

  BenchmarkReport report;
  report.tool_version = DESCTRACK_VERSION;
  report.descriptor = descriptor;
  report.mode = options.distinctiveness ? "run" : "profile";
  report.config = config_snapshot(cfg);
  report.jobs = std::max<std::size_t>(1, std::min(options.jobs, sequences.size()));
  report.hardware_threads = std::thread::hardware_concurrency();
  report.ransac_seed = cfg.tracker.ransac_seed;
  report.sequences.resize(sequences.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    const auto extractor = make_extractor(descriptor);
    for (std::size_t i = next++; i < sequences.size(); i = next++) {
      try {
        report.sequences[i] = benchmark_sequence(sequences[i], *extractor, cfg, options.distinctiveness);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (report.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < report.jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<StageTiming> all;
  for (const auto& s : report.sequences) all.insert(all.end(), s.timings.begin(), s.timings.end());
  report.timing_summary = aggregate_timings(group_by_resolution(all));
  report.correlation = cross_sequence_correlation(report.sequences);
  return report;
}

std::vector<std::filesystem::path> find_sequence_dirs(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError("dataset directory not found: " + root.string());
  if (fs::exists(root / kGroundTruthFile)) return {root};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && fs::exists(e.path() / kGroundTruthFile)) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no sequences (directories with groundtruth.txt) under " + root.string());
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json box_json(const std::optional<OrientedBox>& b) {
  if (!b) return nullptr;
  json a = json::array();
  for (const auto& p : b->vertices()) {
    a.push_back(round_sig6(p.x));
    a.push_back(round_sig6(p.y));
  }
  return a;
}

std::optional<OrientedBox> box_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  std::array<Point2, 4> v;
  for (std::size_t i = 0; i < 4; ++i) v[i] = {j.at(2 * i).get<double>(), j.at(2 * i + 1).get<double>()};
  return OrientedBox(v);
}

json stat_json(const StageStat& s) {
  return {{"mean", round_sig6(s.mean)},
          {"variance", round_sig6(s.variance)},
          {"min", round_sig6(s.min)},
          {"max", round_sig6(s.max)}};
}

StageStat stat_from_json(const json& j) {
  return {j.at("mean").get<double>(), j.at("variance").get<double>(), j.at("min").get<double>(),
          j.at("max").get<double>()};
}

json correlation_json(const CorrelationMatrix& c) {
  json values = json::array();
  for (const double v : c.values) values.push_back(round_sig6(v));
  return {{"names", c.names}, {"values", values}, {"zero_variance", c.zero_variance}};
}

CorrelationMatrix correlation_from_json(const json& j) {
  CorrelationMatrix c;
  c.names = j.at("names").get<std::vector<std::string>>();
  c.values = j.at("values").get<std::vector<double>>();
  c.zero_variance = j.at("zero_variance").get<std::vector<bool>>();
  return c;
}

json frame_stats_json(const FrameMatchStats& s) {
  return {{"frame", s.frame}, {"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}, {"unlabeled", s.unlabeled},
          {"ttp", s.ttp}, {"total_keypoints", s.total_keypoints},
          {"object_keypoints", s.object_keypoints}};
}

FrameMatchStats frame_stats_from_json(const json& j) {
  FrameMatchStats s;
  s.frame = j.at("frame");
  s.tp = j.at("tp");
  s.fp = j.at("fp");
  s.fn = j.at("fn");
  s.unlabeled = j.at("unlabeled");
  s.ttp = j.at("ttp");
  s.total_keypoints = j.at("total_keypoints");
  s.object_keypoints = j.at("object_keypoints");
  return s;
}

json summary_json(const SequenceMatchStats& s) {
  return {{"frames", s.frames},
          {"mean_tp", round_sig6(s.mean_tp)},
          {"mean_fp", round_sig6(s.mean_fp)},
          {"mean_fn", round_sig6(s.mean_fn)},
          {"mean_unlabeled", round_sig6(s.mean_unlabeled)},
          {"mean_ttp", round_sig6(s.mean_ttp)},
          {"mean_total_keypoints", round_sig6(s.mean_total_keypoints)},
          {"mean_object_keypoints", round_sig6(s.mean_object_keypoints)},
          {"mean_tp_ratio", round_sig6(s.mean_tp_ratio)},
          {"mean_fp_ratio", round_sig6(s.mean_fp_ratio)},
          {"mean_ttp_ratio", round_sig6(s.mean_ttp_ratio)}};
}

SequenceMatchStats summary_from_json(const json& j) {
  SequenceMatchStats s;
  s.frames = j.at("frames");
  s.mean_tp = j.at("mean_tp");
  s.mean_fp = j.at("mean_fp");
  s.mean_fn = j.at("mean_fn");
  s.mean_unlabeled = j.at("mean_unlabeled");
  s.mean_ttp = j.at("mean_ttp");
  s.mean_total_keypoints = j.at("mean_total_keypoints");
  s.mean_object_keypoints = j.at("mean_object_keypoints");
  s.mean_tp_ratio = j.at("mean_tp_ratio");
  s.mean_fp_ratio = j.at("mean_fp_ratio");
  s.mean_ttp_ratio = j.at("mean_ttp_ratio");
  return s;
}

json timing_json(const StageTiming& t) {
  return {{"frame", t.frame},
          {"width", t.width},
          {"height", t.height},
          {"detect_ms", round_sig6(t.detect_ms)},
          {"extract_ms", round_sig6(t.extract_ms)},
          {"match_ms", round_sig6(t.match_ms)},
          {"track_ms", round_sig6(t.track_ms)},
          {"total_ms", round_sig6(t.total_ms)},
          {"keypoint_count", t.keypoint_count}};
}

StageTiming timing_from_json(const json& j) {
  StageTiming t;
  t.frame = j.at("frame");
  t.width = j.at("width");
  t.height = j.at("height");
  t.detect_ms = j.at("detect_ms");
  t.extract_ms = j.at("extract_ms");
  t.match_ms = j.at("match_ms");
  t.track_ms = j.at("track_ms");
  t.total_ms = j.at("total_ms");
  t.keypoint_count = j.at("keypoint_count");
  return t;
}

json aggregate_json(const TimingAggregate& a) {
  return {{"width", a.width},           {"height", a.height},
          {"samples", a.samples},       {"single_sample", a.single_sample},
          {"detect_ms", stat_json(a.detect)}, {"extract_ms", stat_json(a.extract)},
          {"match_ms", stat_json(a.match)},   {"track_ms", stat_json(a.track)},
          {"total_ms", stat_json(a.total)}};
}

TimingAggregate aggregate_from_json(const json& j) {
  TimingAggregate a;
  a.width = j.at("width");
  a.height = j.at("height");
  a.samples = j.at("samples");
  a.single_sample = j.at("single_sample");
  a.detect = stat_from_json(j.at("detect_ms"));
  a.extract = stat_from_json(j.at("extract_ms"));
  a.match = stat_from_json(j.at("match_ms"));
  a.track = stat_from_json(j.at("track_ms"));
  a.total = stat_from_json(j.at("total_ms"));
  return a;
}

json sequence_json(const SequenceReport& s) {
  json j;
  j["name"] = s.name;
  j["width"] = s.width;
  j["height"] = s.height;
  j["frames"] = s.frames;
  j["untrackable"] = s.untrackable;
  j["error"] = s.error;
  json stats = json::array();
  for (const auto& m : s.match_stats) stats.push_back(frame_stats_json(m));
  j["match_stats"] = stats;
  j["match_summary"] = s.match_summary ? summary_json(*s.match_summary) : json(nullptr);
  json overlaps = json::array();
  for (const auto& o : s.overlaps) {
    overlaps.push_back({{"frame", o.frame}, {"overlap", round_sig6(o.overlap)}, {"lost", o.lost}});
  }
  j["overlaps"] = overlaps;
  json rates = json::array();
  for (const auto& [u, f] : s.success_rates) {
    rates.push_back({{"upsilon", round_sig6(u)}, {"fraction", round_sig6(f)}});
  }
  j["success_rates"] = rates;
  json timings = json::array();
  for (const auto& t : s.timings) timings.push_back(timing_json(t));
  j["timings"] = timings;
  j["correlation"] = s.correlation ? correlation_json(*s.correlation) : json(nullptr);
  json boxes = json::array();
  for (const auto& b : s.boxes) boxes.push_back(box_json(b));
  j["boxes"] = boxes;
  return j;
}

SequenceReport sequence_from_json(const json& j) {
  SequenceReport s;
  s.name = j.at("name");
  s.width = j.at("width");
  s.height = j.at("height");
  s.frames = j.at("frames");
  s.untrackable = j.at("untrackable");
  s.error = j.at("error");
  for (const auto& m : j.at("match_stats")) s.match_stats.push_back(frame_stats_from_json(m));
  if (!j.at("match_summary").is_null()) s.match_summary = summary_from_json(j.at("match_summary"));
  for (const auto& o : j.at("overlaps")) {
    s.overlaps.push_back({o.at("frame").get<std::size_t>(), o.at("overlap").get<double>(),
                          o.at("lost").get<bool>()});
  }
  for (const auto& r : j.at("success_rates")) {
    s.success_rates.emplace_back(r.at("upsilon").get<double>(), r.at("fraction").get<double>());
  }
  for (const auto& t : j.at("timings")) s.timings.push_back(timing_from_json(t));
  if (!j.at("correlation").is_null()) s.correlation = correlation_from_json(j.at("correlation"));
  for (const auto& b : j.at("boxes")) s.boxes.push_back(box_from_json(b));
  return s;
}

}  // namespace

json to_json(const BenchmarkReport& r) {
  json j;
  j["schema"] = r.schema;
  j["tool_version"] = r.tool_version;
  j["descriptor"] = r.descriptor;
  j["mode"] = r.mode;
  json config = json::array();
  for (const auto& [k, v] : r.config) config.push_back({{"key", k}, {"value", v}});
  j["config"] = config;
  j["jobs"] = r.jobs;
  j["hardware_threads"] = r.hardware_threads;
  j["seeds"] = {{"ransac", r.ransac_seed}};
  json seqs = json::array();
  for (const auto& s : r.sequences) seqs.push_back(sequence_json(s));
  j["sequences"] = seqs;
  json summary = json::array();
  for (const auto& a : r.timing_summary) summary.push_back(aggregate_json(a));
  j["timing_summary"] = summary;
  j["correlation"] = r.correlation ? correlation_json(*r.correlation) : json(nullptr);
  return j;
}

BenchmarkReport report_from_json(const json& j) {
  const auto problems = validate_report_json(j);
  if (!problems.empty()) throw DataError("invalid report: " + problems.front());
  BenchmarkReport r;
  r.schema = j.at("schema");
  r.tool_version = j.at("tool_version");
  r.descriptor = j.at("descriptor");
  r.mode = j.at("mode");
  for (const auto& kv : j.at("config")) r.config.emplace_back(kv.at("key"), kv.at("value"));
  r.jobs = j.at("jobs");
  r.hardware_threads = j.at("hardware_threads");
  r.ransac_seed = j.at("seeds").at("ransac");
  for (const auto& s : j.at("sequences")) r.sequences.push_back(sequence_from_json(s));
  for (const auto& a : j.at("timing_summary")) r.timing_summary.push_back(aggregate_from_json(a));
  if (!j.at("correlation").is_null()) r.correlation = correlation_from_json(j.at("correlation"));
  return r;
}

namespace {

void check_correlation(const json& c, const std::string& where, std::vector<std::string>& out) {
  if (c.is_null()) return;
  if (!c.is_object() || !c.contains("names") || !c.contains("values") || !c.contains("zero_variance")) {
    out.push_back(where + ": malformed correlation matrix");
    return;
  }
  const std::size_t k = c["names"].size();
  if (c["values"].size() != k * k) out.push_back(where + ": correlation values are not K x K");
  if (c["zero_variance"].size() != k) out.push_back(where + ": zero_variance length differs from names");
}

}  // namespace

std::vector<std::string> validate_report_json(const json& j) {
  std::vector<std::string> out;
  if (!j.is_object()) return {"report is not an object"};
  auto need = [&](const json& obj, const char* key, json::value_t type, const std::string& where) {
    if (!obj.contains(key)) {
      out.push_back(where + ": missing '" + key + "'");
      return false;
    }
    const json& v = obj.at(key);
    const bool ok = v.type() == type ||
                    (type == json::value_t::number_float && v.is_number()) ||
                    (type == json::value_t::number_unsigned && v.is_number_integer() &&
                     v.get<long long>() >= 0) ||
                    (type == json::value_t::object && v.is_null());
    if (!ok) out.push_back(where + ": '" + key + "' has the wrong type");
    return ok;
  };
  using T = json::value_t;
  if (need(j, "schema", T::string, "report") && j["schema"] != kReportSchema) {
    out.push_back("report: unsupported schema " + j["schema"].get<std::string>());
  }
  need(j, "tool_version", T::string, "report");
  need(j, "descriptor", T::string, "report");
  need(j, "mode", T::string, "report");
  need(j, "config", T::array, "report");
  need(j, "jobs", T::number_unsigned, "report");
  need(j, "hardware_threads", T::number_unsigned, "report");
  if (need(j, "seeds", T::object, "report") && !j["seeds"].is_null()) {
    need(j["seeds"], "ransac", T::number_unsigned, "seeds");
  }
  need(j, "timing_summary", T::array, "report");
  if (j.contains("correlation")) check_correlation(j["correlation"], "report", out);
  else out.push_back("report: missing 'correlation'");
  if (j.contains("config") && j["config"].is_array()) {
    for (const auto& kv : j["config"]) {
      if (!kv.is_object() || !kv.contains("key") || !kv.contains("value") || !kv["key"].is_string() ||
          !kv["value"].is_string()) {
        out.push_back("config: entries must be {key, value} strings");
        break;
      }
    }
  }
  if (!need(j, "sequences", T::array, "report")) return out;
  std::set<std::string> names;
  for (const auto& s : j["sequences"]) {
    if (!s.is_object()) {
      out.push_back("sequences: entry is not an object");
      continue;
    }
    const std::string where =
        "sequence " + (s.contains("name") && s["name"].is_string() ? s["name"].get<std::string>() : "?");
    bool ok = need(s, "name", T::string, where);
    ok &= need(s, "frames", T::number_unsigned, where);
    for (const char* key : {"match_stats", "overlaps", "success_rates", "timings", "boxes"}) {
      ok &= need(s, key, T::array, where);
    }
    ok &= need(s, "untrackable", T::boolean, where);
    need(s, "width", T::number_unsigned, where);
    need(s, "height", T::number_unsigned, where);
    need(s, "error", T::string, where);
    need(s, "match_summary", T::object, where);
    if (s.contains("correlation")) check_correlation(s["correlation"], where, out);
    else out.push_back(where + ": missing 'correlation'");
    if (!ok) continue;
    if (!names.insert(s["name"].get<std::string>()).second) out.push_back(where + ": duplicate name");
    const std::size_t n = s["frames"];
    if (s["overlaps"].size() != n) out.push_back(where + ": overlaps do not cover every frame once");
    if (s["timings"].size() != n) out.push_back(where + ": timings do not cover every frame once");
    if (s["boxes"].size() != n) out.push_back(where + ": box count differs from frame count");
    if (!s["match_stats"].empty() && s["match_stats"].size() + 1 != n) {
      out.push_back(where + ": match_stats must cover frames 2..n");
    }
    for (std::size_t i = 0; i < s["overlaps"].size(); ++i) {
      const json& o = s["overlaps"][i];
      if (!o.is_object() || !o.contains("frame") || o["frame"] != i + 1 || !o.contains("overlap") ||
          !o["overlap"].is_number() || o["overlap"].get<double>() < 0.0 || o["overlap"].get<double>() > 1.0) {
        out.push_back(where + ": bad overlap entry " + std::to_string(i + 1));
        break;
      }
    }
    for (std::size_t i = 0; i < s["timings"].size(); ++i) {
      const json& t = s["timings"][i];
      bool good = t.is_object() && t.contains("frame") && t["frame"] == i + 1;
      for (const char* key : {"detect_ms", "extract_ms", "match_ms", "track_ms", "total_ms"}) {
        good = good && t.contains(key) && t[key].is_number() && t[key].get<double>() >= 0.0;
      }
      if (!good) {
        out.push_back(where + ": bad timing entry " + std::to_string(i + 1));
        break;
      }
    }
    for (const auto& r : s["success_rates"]) {
      if (!r.is_object() || !r.contains("upsilon") || !r.contains("fraction") ||
          !r["fraction"].is_number() || r["fraction"].get<double>() < 0.0 ||
          r["fraction"].get<double>() > 1.0) {
        out.push_back(where + ": bad success rate entry");
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission

namespace {

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// CSV field; quoted when it holds a separator or quote.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string box_file_name(const std::string& name) {
  std::string s;
  for (const char c : name) {
    s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  }
  return s + ".txt";
}

std::vector<std::pair<std::string, std::string>> csv_tables(const BenchmarkReport& r) {
  const std::string d = field(r.descriptor);
  std::ostringstream ms, ov, sr, tm, ts, co;
  ms << "descriptor,sequence,frame,tp,fp,fn,unlabeled,ttp,total_keypoints,object_keypoints\n";
  ov << "descriptor,sequence,frame,overlap,lost\n";
  sr << "descriptor,sequence,upsilon,fraction\n";
  tm << "descriptor,sequence,frame,width,height,detect_ms,extract_ms,match_ms,track_ms,total_ms,"
        "keypoint_count\n";
  ts << "descriptor,width,height,stage,samples,single_sample,mean,variance,min,max\n";
  co << "descriptor,scope,measure_a,measure_b,r\n";
  auto corr_rows = [&](const CorrelationMatrix& c, const std::string& scope) {
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = 0; b < c.size(); ++b) {
        co << d << ',' << field(scope) << ',' << c.names[a] << ',' << c.names[b] << ','
           << real(c.at(a, b)) << '\n';
      }
    }
  };
  for (const auto& s : r.sequences) {
    const std::string n = field(s.name);
    for (const auto& m : s.match_stats) {
      ms << d << ',' << n << ',' << m.frame << ',' << m.tp << ',' << m.fp << ',' << m.fn << ','
         << m.unlabeled << ',' << m.ttp << ',' << m.total_keypoints << ',' << m.object_keypoints << '\n';
    }
    for (const auto& o : s.overlaps) {
      ov << d << ',' << n << ',' << o.frame << ',' << real(o.overlap) << ',' << (o.lost ? 1 : 0) << '\n';
    }
    for (const auto& [u, f] : s.success_rates) sr << d << ',' << n << ',' << real(u) << ',' << real(f) << '\n';
    for (const auto& t : s.timings) {
      tm << d << ',' << n << ',' << t.frame << ',' << t.width << ',' << t.height << ',' << real(t.detect_ms)
         << ',' << real(t.extract_ms) << ',' << real(t.match_ms) << ',' << real(t.track_ms) << ','
         << real(t.total_ms) << ',' << t.keypoint_count << '\n';
    }
    if (s.correlation) corr_rows(*s.correlation, s.name);
  }
  if (r.correlation) corr_rows(*r.correlation, "all");
  for (const auto& a : r.timing_summary) {
    const std::pair<const char*, const StageStat*> stages[] = {
        {"detect", &a.detect}, {"extract", &a.extract}, {"match", &a.match},
        {"track", &a.track},   {"total", &a.total}};
    for (const auto& [stage, st] : stages) {
      ts << d << ',' << a.width << ',' << a.height << ',' << stage << ',' << a.samples << ','
         << (a.single_sample ? 1 : 0) << ',' << real(st->mean) << ',' << real(st->variance) << ','
         << real(st->min) << ',' << real(st->max) << '\n';
    }
  }
  return {{"match_stats.csv", ms.str()}, {"overlaps.csv", ov.str()},
          {"success_rates.csv", sr.str()}, {"timings.csv", tm.str()},
          {"timing_summary.csv", ts.str()}, {"correlations.csv", co.str()}};
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const BenchmarkReport& report, ReportFormat format,
                                               const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (report.sequences.empty()) throw std::invalid_argument("emit_report: report has no sequences");

  // Everything is rendered before the first file is created.
  std::vector<std::pair<fs::path, std::string>> files;
  if (format == ReportFormat::Json) {
    files.emplace_back("report.json", to_json(report).dump(2) + "\n");
  } else {
    for (auto& [name, content] : csv_tables(report)) files.emplace_back(name, std::move(content));
  }
  for (const auto& s : report.sequences) {
    files.emplace_back(fs::path("boxes") / box_file_name(s.name), serialize_boxes(s.boxes));
  }

  std::vector<fs::path> written;
  try {
    std::error_code ec;
    fs::create_directories(dir / "boxes", ec);
    if (ec) throw IoError("cannot create " + (dir / "boxes").string() + ": " + ec.message());
    for (const auto& [rel, content] : files) {
      write_file(dir / rel, content);
      written.push_back(dir / rel);
    }
  } catch (const IoError&) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  return written;
}

}  // namespace desctrack
