#include "desctrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "desctrack/errors.hpp"

namespace desctrack {

const char* to_string(MatchLabel label) {
  switch (label) {
    case MatchLabel::TruePositive: return "TP";
    case MatchLabel::FalsePositive: return "FP";
    case MatchLabel::FalseNegative: return "FN";
    case MatchLabel::Unlabeled: return "unlabeled";
  }
  return "?";
}

double FrameMatchStats::tp_ratio() const {
  const std::size_t labeled = tp + fp + fn;
  return labeled == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(labeled);
}

double FrameMatchStats::fp_ratio() const {
  const std::size_t labeled = tp + fp + fn;
  return labeled == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(labeled);
}

void EvalConfig::validate() const {
  if (upsilon_levels.empty()) throw ConfigError("eval.upsilon needs at least one level");
  for (std::size_t i = 0; i < upsilon_levels.size(); ++i) {
    const double u = upsilon_levels[i];
    if (!(u > 0.0 && u < 1.0)) throw ConfigError("eval.upsilon levels must lie in (0, 1)");
    if (i > 0 && !(u > upsilon_levels[i - 1])) {
      throw ConfigError("eval.upsilon levels must be strictly increasing");
    }
  }
}

std::vector<MatchLabel> label_matches(std::span<const MatchRecord> matches,
                                      std::span<const Keypoint> first_keypoints,
                                      std::span<const Keypoint> current_keypoints,
                                      const OrientedBox& first_box,
                                      const OrientedBox& current_box) {
  std::vector<MatchLabel> labels;
  labels.reserve(matches.size());
  for (const auto& m : matches) {
    if (m.query_idx >= first_keypoints.size() || m.train_idx >= current_keypoints.size()) {
      throw std::out_of_range("match index out of range");
    }
    const bool in_first = point_in_box(first_keypoints[m.query_idx].position, first_box);
    const bool in_current = point_in_box(current_keypoints[m.train_idx].position, current_box);
    if (in_first) {
      labels.push_back(in_current ? MatchLabel::TruePositive : MatchLabel::FalsePositive);
    } else {
      labels.push_back(in_current ? MatchLabel::FalseNegative : MatchLabel::Unlabeled);
    }
  }
  return labels;
}

FrameMatchStats frame_stats(std::size_t frame, std::span<const MatchLabel> labels,
                            std::span<const MatchRecord> matches,
                            std::span<const Keypoint> current_keypoints,
                            const OrientedBox& current_box) {
  if (labels.size() != matches.size()) {
    throw std::invalid_argument("labels and matches must be parallel");
  }
  FrameMatchStats s;
  s.frame = frame;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case MatchLabel::TruePositive:
        ++s.tp;
        if (!matches[i].ambiguous) ++s.ttp;
        break;
      case MatchLabel::FalsePositive: ++s.fp; break;
      case MatchLabel::FalseNegative: ++s.fn; break;
      case MatchLabel::Unlabeled: ++s.unlabeled; break;
    }
  }
  s.total_keypoints = current_keypoints.size();
  s.object_keypoints = static_cast<std::size_t>(
      std::count_if(current_keypoints.begin(), current_keypoints.end(),
                    [&](const Keypoint& kp) { return point_in_box(kp.position, current_box); }));
  return s;
}

SequenceMatchStats sequence_stats(std::span<const FrameMatchStats> per_frame) {
  if (per_frame.empty()) throw std::invalid_argument("sequence_stats needs at least one frame");
  SequenceMatchStats a;
  a.frames = per_frame.size();
  for (const auto& f : per_frame) {
    a.mean_tp += static_cast<double>(f.tp);
    a.mean_fp += static_cast<double>(f.fp);
    a.mean_fn += static_cast<double>(f.fn);
    a.mean_unlabeled += static_cast<double>(f.unlabeled);
    a.mean_ttp += static_cast<double>(f.ttp);
    a.mean_total_keypoints += static_cast<double>(f.total_keypoints);
    a.mean_object_keypoints += static_cast<double>(f.object_keypoints);
    a.mean_tp_ratio += f.tp_ratio();
    a.mean_fp_ratio += f.fp_ratio();
    const std::size_t labeled = f.tp + f.fp + f.fn;
    a.mean_ttp_ratio +=
        labeled == 0 ? 0.0 : static_cast<double>(f.ttp) / static_cast<double>(labeled);
  }
  const double n = static_cast<double>(per_frame.size());
  for (double* v : {&a.mean_tp, &a.mean_fp, &a.mean_fn, &a.mean_unlabeled, &a.mean_ttp,
                    &a.mean_total_keypoints, &a.mean_object_keypoints, &a.mean_tp_ratio,
                    &a.mean_fp_ratio, &a.mean_ttp_ratio}) {
    *v /= n;
  }
  return a;
}

std::vector<std::pair<double, double>> success_rates(std::span<const double> overlaps,
                                                     const EvalConfig& cfg) {
  if (overlaps.empty()) throw std::invalid_argument("success_rates needs at least one overlap");
  cfg.validate();
  std::vector<std::pair<double, double>> out;
  for (const double u : cfg.upsilon_levels) {
    const auto above = std::count_if(overlaps.begin(), overlaps.end(),
                                     [u](double theta) { return theta > u; });
    out.emplace_back(u, static_cast<double>(above) / static_cast<double>(overlaps.size()));
  }
  return out;
}

CorrelationMatrix correlation_matrix(std::span<const NamedMeasure> measures) {
  const std::size_t k = measures.size();
  if (k == 0) throw std::invalid_argument("correlation_matrix needs at least one measure");
  const std::size_t n = measures[0].values.size();
  if (n < 2) throw std::invalid_argument("correlation_matrix needs at least two samples");
  for (const auto& m : measures) {
    if (m.values.size() != n) {
      throw std::invalid_argument("measure '" + m.name + "' has " +
                                  std::to_string(m.values.size()) + " samples, expected " +
                                  std::to_string(n));
    }
  }

  // Centred copies; two-pass for accuracy.
  std::vector<std::vector<double>> centred(k);
  std::vector<double> norms(k);
  CorrelationMatrix out;
  out.values.assign(k * k, 0.0);
  out.zero_variance.assign(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    out.names.push_back(measures[i].name);
    double mean = 0.0;
    for (const double v : measures[i].values) mean += v;
    mean /= static_cast<double>(n);
    centred[i].reserve(n);
    double ss = 0.0;
    for (const double v : measures[i].values) {
      centred[i].push_back(v - mean);
      ss += (v - mean) * (v - mean);
    }
    norms[i] = std::sqrt(ss);
    out.zero_variance[i] = !(norms[i] > 0.0) || !std::isfinite(norms[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    out.values[i * k + i] = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      double r = 0.0;
      if (!out.zero_variance[i] && !out.zero_variance[j]) {
        double dot = 0.0;
        for (std::size_t s = 0; s < n; ++s) dot += centred[i][s] * centred[j][s];
        r = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      }
      out.values[i * k + j] = r;
      out.values[j * k + i] = r;
    }
  }
  return out;
}

}  // namespace desctrack
