#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "desctrack/dataset.hpp"
#include "desctrack/errors.hpp"
#include "desctrack/evaluation.hpp"
#include "desctrack/profiling.hpp"
#include "desctrack/run_config.hpp"

namespace desctrack::cli {
namespace {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// --jobs, then DESCTRACK_JOBS, then `fallback`.
std::size_t resolve_jobs(int flag, std::size_t fallback) {
  if (flag > 0) return static_cast<std::size_t>(flag);
  if (const char* env = std::getenv("DESCTRACK_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw ConfigError(std::string("DESCTRACK_JOBS must be a positive integer, got '") + env + "'");
  }
  return std::max<std::size_t>(1, fallback);
}

struct BenchArgs {
  std::string dataset;
  std::string descriptor = "binary256";
  std::string config;
  std::string out;
  std::string format = "both";
  int jobs = 0;
  bool no_match_stats = false;
};

void add_bench_options(CLI::App* cmd, BenchArgs& a) {
  cmd->add_option("--dataset", a.dataset, "Sequence directory, or a directory of sequences")->required();
  cmd->add_option("--descriptor", a.descriptor, "Extractor name")->capture_default_str();
  cmd->add_option("--config", a.config, "Run-config file (key=value)");
  cmd->add_option("--out", a.out, "Report directory")->required();
  cmd->add_option("--jobs", a.jobs, "Parallel sequences (fallback: DESCTRACK_JOBS)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", a.format, "json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();
}

int run_bench(const BenchArgs& a, bool profile, std::ostream& out) {
  const RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  (void)make_extractor(a.descriptor);
  const std::size_t jobs =
      resolve_jobs(a.jobs, profile ? 1 : std::thread::hardware_concurrency());

  std::vector<Sequence> sequences;
  for (const auto& dir : find_sequence_dirs(a.dataset)) sequences.push_back(load_sequence(dir));

  BenchmarkOptions options;
  options.jobs = jobs;
  options.distinctiveness = !profile && !a.no_match_stats;
  BenchmarkReport report = run_benchmark(sequences, a.descriptor, cfg, options);
  if (profile) report.mode = "profile";

  std::vector<fs::path> files;
  if (a.format != "csv") {
    auto f = emit_report(report, ReportFormat::Json, a.out);
    files.insert(files.end(), f.begin(), f.end());
  }
  if (a.format != "json") {
    auto f = emit_report(report, ReportFormat::Csv, a.out);
    files.insert(files.end(), f.begin(), f.end());
  }

  for (const auto& s : report.sequences) {
    out << s.name << ": " << s.frames << " frames";
    if (s.untrackable) {
      out << ", untrackable (" << s.error << ")\n";
      continue;
    }
    for (const auto& [u, f] : s.success_rates) out << ", success@" << fmt(u) << "=" << fmt(f);
    if (s.match_summary) out << ", mean tp ratio " << fmt(s.match_summary->mean_tp_ratio);
    out << "\n";
  }
  for (const auto& t : report.timing_summary) {
    out << t.width << "x" << t.height << ": detect " << fmt(t.detect.mean) << " ms, extract "
        << fmt(t.extract.mean) << " ms, match " << fmt(t.match.mean) << " ms, total "
        << fmt(t.total.mean) << " ms (mean of " << t.samples << ")\n";
  }
  out << "wrote " << files.size() << " files to " << a.out << "\n";
  return kOk;
}

struct SynthArgs {
  std::string preset;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t frames = 0;
  double scale = 1.0;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  SynthesisConfig cfg = synthesis_preset(a.preset, a.seed, a.scale);
  if (a.frames > 0) {
    if (a.frames < 2 || a.frames > cfg.frame_count) {
      throw std::invalid_argument("--frames must be in [2, " + std::to_string(cfg.frame_count) +
                                  "] for preset " + a.preset);
    }
    cfg.frame_count = a.frames;
    cfg.motion.resize(a.frames);
  }
  const Sequence seq = generate_synthetic(cfg);
  save_sequence(seq, a.out);
  out << "wrote " << seq.size() << " frames (" << seq.frame(0).width() << "x"
      << seq.frame(0).height() << ") to " << a.out << "\n";
  return kOk;
}

struct EvalArgs {
  std::string pred;
  std::string gt;
  bool include_first = false;
  std::string out;
  std::vector<double> upsilon;
};

int run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto pred = parse_box_rows(read_text(a.pred));
  const auto gt = parse_ground_truth(read_text(a.gt));
  if (pred.size() != gt.size()) {
    const bool pred_short = pred.size() < gt.size();
    err << "desctrack eval: row count mismatch: " << a.pred << " has " << pred.size() << " rows, "
        << a.gt << " has " << gt.size() << "; line " << std::min(pred.size(), gt.size()) + 1
        << " of " << (pred_short ? a.gt : a.pred) << " has no counterpart\n";
    return kData;
  }
  EvalConfig cfg;
  if (!a.upsilon.empty()) cfg.upsilon_levels = a.upsilon;
  cfg.validate();

  const std::size_t first = a.include_first ? 0 : 1;
  std::vector<double> overlaps;
  std::ostringstream csv;
  csv << "frame,overlap\n";
  for (std::size_t i = first; i < gt.size(); ++i) {
    const double o = pred[i] ? overlap(*pred[i], gt[i]) : 0.0;
    overlaps.push_back(o);
    csv << i + 1 << "," << fmt(o) << "\n";
  }
  if (overlaps.empty()) throw DataError("no frames to evaluate");
  double sum = 0.0;
  for (const double o : overlaps) sum += o;
  out << "frames " << overlaps.size() << "\n";
  out << "mean_overlap " << fmt(sum / static_cast<double>(overlaps.size())) << "\n";
  for (const auto& [u, f] : success_rates(overlaps, cfg)) out << "success " << fmt(u) << " " << fmt(f) << "\n";
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f || !(f << csv.str())) throw IoError("cannot write " + a.out);
  }
  return kOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Keypoint descriptor tracking benchmark", "desctrack"};
  app.set_version_flag("--version", std::string(DESCTRACK_VERSION));
  app.require_subcommand(1);

  BenchArgs run_args;
  auto* run = app.add_subcommand("run", "Full benchmark: tracking, match statistics, timings");
  add_bench_options(run, run_args);
  run->add_flag("--no-match-stats", run_args.no_match_stats, "Skip the distinctiveness evaluation");

  BenchArgs profile_args;
  auto* profile = app.add_subcommand("profile", "Timing-only benchmark (one job unless --jobs)");
  add_bench_options(profile, profile_args);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic fixture sequence");
  synth->add_option("--preset", synth_args.preset, "translation, rotscale or occlusion")->required();
  synth->add_option("--seed", synth_args.seed, "Texture and noise seed")->required();
  synth->add_option("--out", synth_args.out, "Output sequence directory")->required();
  synth->add_option("--frames", synth_args.frames, "Keep only the first N frames");
  synth->add_option("--scale", synth_args.scale, "Resolution scale (0.5 gives 320x240)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Overlap and success rates of saved boxes");
  eval->add_option("--pred", eval_args.pred, "Predicted boxes (8 values per row, nan if absent)")
      ->required();
  eval->add_option("--gt", eval_args.gt, "Ground-truth boxes")->required();
  eval->add_flag("--include-first", eval_args.include_first, "Score frame 1 (the initial box) too");
  eval->add_option("--upsilon", eval_args.upsilon, "Precision levels")->delimiter(',');
  eval->add_option("--out", eval_args.out, "Per-frame overlap CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    CLI::App* failed = &app;
    for (CLI::App* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return kUsage;
  }

  try {
    if (*run) return run_bench(run_args, false, out);
    if (*profile) return run_bench(profile_args, true, out);
    if (*synth) return run_synth(synth_args, out);
    if (*eval) return run_eval(eval_args, out, err);
  } catch (const ParseError& e) {
    err << "desctrack: " << e.what() << "\n";
    return kData;
  } catch (const ConfigError& e) {
    err << "desctrack: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "desctrack: " << e.what() << "\n";
    return kData;
  } catch (const IoError& e) {
    err << "desctrack: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    err << "desctrack: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "desctrack: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace desctrack::cli
