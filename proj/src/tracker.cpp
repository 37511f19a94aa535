#include "desctrack/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <map>

#include "desctrack/random.hpp"

namespace desctrack {

void TrackerConfig::validate() const {
  if (!(fb_error_threshold > 0.0)) throw ConfigError("tracker.fb_error_threshold must be > 0");
  if (lk_window < 3 || lk_window % 2 == 0) throw ConfigError("tracker.lk_window must be odd, >= 3");
  if (lk_pyramid_levels < 1) throw ConfigError("tracker.lk_pyramid_levels must be >= 1");
  if (lk_max_iters < 1) throw ConfigError("tracker.lk_max_iters must be >= 1");
  if (!(lk_epsilon > 0.0)) throw ConfigError("tracker.lk_epsilon must be > 0");
  if (!(lk_min_eigenvalue > 0.0)) throw ConfigError("tracker.lk_min_eigenvalue must be > 0");
  if (min_inliers < 2) throw ConfigError("tracker.min_inliers must be >= 2");
  if (ransac_iters < 1) throw ConfigError("tracker.ransac_iters must be >= 1");
  if (!(ransac_inlier_px > 0.0)) throw ConfigError("tracker.ransac_inlier_px must be > 0");
  if (!(search_inflation >= 1.0)) throw ConfigError("tracker.search_inflation must be >= 1");
  if (min_match_support < 0) throw ConfigError("tracker.min_match_support must be >= 0");
  detector.validate();
  matcher.validate();
}

// ---------------------------------------------------------------------------
// Lucas-Kanade

namespace {

struct FloatImage {
  int w = 0;
  int h = 0;
  std::vector<float> v;

  FloatImage() = default;
  FloatImage(int width, int height) : w(width), h(height), v(std::size_t(width) * height) {}

  float at(int x, int y) const { return v[std::size_t(y) * w + x]; }
  float& at(int x, int y) { return v[std::size_t(y) * w + x]; }
  float clamped(int x, int y) const {
    return at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  }
  double bilinear(double x, double y) const {
    x = std::clamp(x, 0.0, double(w - 1));
    y = std::clamp(y, 0.0, double(h - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ax = x - x0;
    const double ay = y - y0;
    return (1 - ay) * ((1 - ax) * at(x0, y0) + ax * at(x1, y0)) +
           ay * ((1 - ax) * at(x0, y1) + ax * at(x1, y1));
  }
};

struct LkLevel {
  FloatImage img;
  FloatImage gx;
  FloatImage gy;
};

FloatImage downsample(const FloatImage& src) {
  static constexpr float k[5] = {1.f / 16, 4.f / 16, 6.f / 16, 4.f / 16, 1.f / 16};
  FloatImage tmp(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float s = 0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * src.clamped(x + i, y);
      tmp.at(x, y) = s;
    }
  }
  FloatImage out((src.w + 1) / 2, (src.h + 1) / 2);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      float s = 0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * tmp.clamped(2 * x, 2 * y + i);
      out.at(x, y) = s;
    }
  }
  return out;
}

LkLevel make_level(FloatImage img) {
  LkLevel l;
  l.gx = FloatImage(img.w, img.h);
  l.gy = FloatImage(img.w, img.h);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      l.gx.at(x, y) = 0.5f * (img.clamped(x + 1, y) - img.clamped(x - 1, y));
      l.gy.at(x, y) = 0.5f * (img.clamped(x, y + 1) - img.clamped(x, y - 1));
    }
  }
  l.img = std::move(img);
  return l;
}

std::vector<LkLevel> lk_pyramid(const GrayImage& src, int levels, int window) {
  FloatImage base(src.width(), src.height());
  for (std::size_t i = 0; i < base.v.size(); ++i) base.v[i] = src.data()[i] / 255.0f;
  std::vector<LkLevel> pyr;
  pyr.push_back(make_level(std::move(base)));
  for (int l = 1; l < levels; ++l) {
    const FloatImage& prev = pyr.back().img;
    if ((prev.w + 1) / 2 < window || (prev.h + 1) / 2 < window) break;
    pyr.push_back(make_level(downsample(prev)));
  }
  return pyr;
}

std::optional<Point2> track_point(const std::vector<LkLevel>& from, const std::vector<LkLevel>& to,
                                  Point2 p, const TrackerConfig& cfg) {
  const int half = cfg.lk_window / 2;
  const std::size_t n = static_cast<std::size_t>(cfg.lk_window) * cfg.lk_window;
  std::vector<double> wi(n), wx(n), wy(n);
  const int top = static_cast<int>(from.size()) - 1;
  double gx = 0.0;
  double gy = 0.0;
  for (int l = top; l >= 0; --l) {
    const LkLevel& a = from[static_cast<std::size_t>(l)];
    const LkLevel& b = to[static_cast<std::size_t>(l)];
    const double s = std::ldexp(1.0, -l);
    const double px = p.x * s;
    const double py = p.y * s;

    double gxx = 0, gxy = 0, gyy = 0;
    std::size_t k = 0;
    for (int dy = -half; dy <= half; ++dy) {
      for (int dx = -half; dx <= half; ++dx, ++k) {
        wi[k] = a.img.bilinear(px + dx, py + dy);
        wx[k] = a.gx.bilinear(px + dx, py + dy);
        wy[k] = a.gy.bilinear(px + dx, py + dy);
        gxx += wx[k] * wx[k];
        gxy += wx[k] * wy[k];
        gyy += wy[k] * wy[k];
      }
    }
    const double tr = gxx + gyy;
    const double det = gxx * gyy - gxy * gxy;
    const double min_eig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    if (min_eig / static_cast<double>(n) < cfg.lk_min_eigenvalue) return std::nullopt;

    double vx = 0.0;
    double vy = 0.0;
    for (int it = 0; it < cfg.lk_max_iters; ++it) {
      double bx = 0.0;
      double by = 0.0;
      k = 0;
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx, ++k) {
          const double diff = wi[k] - b.img.bilinear(px + gx + vx + dx, py + gy + vy + dy);
          bx += diff * wx[k];
          by += diff * wy[k];
        }
      }
      const double ex = (gyy * bx - gxy * by) / det;
      const double ey = (gxx * by - gxy * bx) / det;
      vx += ex;
      vy += ey;
      if (std::hypot(ex, ey) < cfg.lk_epsilon) break;
    }
    if (l > 0) {
      gx = 2.0 * (gx + vx);
      gy = 2.0 * (gy + vy);
    } else {
      gx += vx;
      gy += vy;
    }
  }
  const Point2 q{p.x + gx, p.y + gy};
  if (!std::isfinite(q.x) || !std::isfinite(q.y)) return std::nullopt;
  return q;
}

}  // namespace

std::vector<std::optional<Point2>> lk_track_points(const GrayImage& prev, const GrayImage& next,
                                                   std::span<const Point2> points,
                                                   const TrackerConfig& cfg) {
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw std::invalid_argument("optical flow frames differ in size");
  }
  std::vector<std::optional<Point2>> out(points.size());
  if (points.empty()) return out;
  const auto a = lk_pyramid(prev, cfg.lk_pyramid_levels, cfg.lk_window);
  const auto b = lk_pyramid(next, cfg.lk_pyramid_levels, cfg.lk_window);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2 p = points[i];
    if (!prev.contains(p.x, p.y)) continue;
    const auto fwd = track_point(a, b, p, cfg);
    if (!fwd || !next.contains(fwd->x, fwd->y)) continue;
    const auto back = track_point(b, a, *fwd, cfg);
    if (!back || distance(*back, p) > cfg.fb_error_threshold) continue;
    out[i] = fwd;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pose

namespace {

using Complex = std::complex<double>;

Complex to_complex(Point2 p) { return {p.x, p.y}; }

SimilarityTransform from_complex(Complex z, Complex t) {
  return SimilarityTransform::make(std::abs(z), std::arg(z), Point2{t.real(), t.imag()});
}

double residual(const SimilarityTransform& t, const Correspondence& c) {
  return distance(apply_transform(t, c.model), c.image);
}

}  // namespace

std::optional<SimilarityTransform> fit_similarity(std::span<const Correspondence> pairs) {
  if (pairs.size() < 2) return std::nullopt;
  Complex ma{0, 0};
  Complex mb{0, 0};
  for (const auto& c : pairs) {
    ma += to_complex(c.model);
    mb += to_complex(c.image);
  }
  ma /= static_cast<double>(pairs.size());
  mb /= static_cast<double>(pairs.size());
  Complex num{0, 0};
  double den = 0.0;
  for (const auto& c : pairs) {
    const Complex a = to_complex(c.model) - ma;
    const Complex b = to_complex(c.image) - mb;
    num += std::conj(a) * b;
    den += std::norm(a);
  }
  if (!(den > 0.0)) return std::nullopt;
  const Complex z = num / den;
  if (!(std::abs(z) > 0.0) || !std::isfinite(std::abs(z))) return std::nullopt;
  return from_complex(z, mb - z * ma);
}

PoseEstimate estimate_pose(std::span<const Correspondence> correspondences,
                           const TrackerConfig& cfg) {
  PoseEstimate result;
  const std::size_t n = correspondences.size();
  if (n < static_cast<std::size_t>(cfg.min_inliers) || n < 2) return result;

  SplitMix64 rng(cfg.ransac_seed);
  std::size_t best_count = 0;
  SimilarityTransform best;
  for (int it = 0; it < cfg.ransac_iters; ++it) {
    const std::size_t i = rng.below(n);
    std::size_t j = rng.below(n - 1);
    if (j >= i) ++j;
    const Complex da = to_complex(correspondences[j].model) - to_complex(correspondences[i].model);
    if (std::abs(da) < 1e-9) continue;
    const Complex z =
        (to_complex(correspondences[j].image) - to_complex(correspondences[i].image)) / da;
    if (!(std::abs(z) > 0.0) || !std::isfinite(std::abs(z))) continue;
    const SimilarityTransform t =
        from_complex(z, to_complex(correspondences[i].image) - z * to_complex(correspondences[i].model));
    std::size_t count = 0;
    for (const auto& c : correspondences) count += residual(t, c) <= cfg.ransac_inlier_px;
    if (count > best_count) {
      best_count = count;
      best = t;
    }
  }
  if (best_count < static_cast<std::size_t>(cfg.min_inliers)) return result;

  std::vector<Correspondence> consensus;
  for (const auto& c : correspondences) {
    if (residual(best, c) <= cfg.ransac_inlier_px) consensus.push_back(c);
  }
  const auto refit = fit_similarity(consensus);
  if (!refit) return result;
  for (std::size_t i = 0; i < n; ++i) {
    if (residual(*refit, correspondences[i]) <= cfg.ransac_inlier_px) result.inliers.push_back(i);
  }
  if (result.inliers.size() < static_cast<std::size_t>(cfg.min_inliers)) {
    result.inliers.clear();
    return result;
  }
  result.ok = true;
  result.transform = *refit;
  return result;
}

// ---------------------------------------------------------------------------
// Tracking loop

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::optional<OrientedBox> box_for(const SimilarityTransform& pose, const OrientedBox& model_box) {
  try {
    return apply_transform(pose, model_box);
  } catch (const DataError&) {
    return std::nullopt;
  }
}

}  // namespace

TrackState tracker_init(const GrayImage& img, const OrientedBox& b1,
                        const DescriptorExtractor& extractor, const TrackerConfig& cfg,
                        StageTimes* times) {
  cfg.validate();
  const auto t_total = Clock::now();
  auto t = Clock::now();
  const ImagePyramid pyr = build_pyramid(img, cfg.detector.octaves, cfg.detector.pyramid_scale);
  const auto keypoints = extractor.detect(pyr, cfg.detector);
  const double detect_ms = ms_since(t);

  t = Clock::now();
  std::vector<Keypoint> inside;
  for (const auto& kp : keypoints) {
    if (point_in_box(kp.position, b1)) inside.push_back(kp);
  }
  DescriptorSet model = extractor.extract(pyr, inside);
  const double extract_ms = ms_since(t);

  if (model.size() < static_cast<std::size_t>(cfg.min_inliers)) {
    throw TrackerInitError("only " + std::to_string(model.size()) +
                           " keypoints inside the initial box (need " +
                           std::to_string(cfg.min_inliers) + ")");
  }

  TrackState s;
  const Point2 centre = b1.centroid();
  s.model_box = apply_transform(SimilarityTransform::make(1.0, 0.0, Point2{} - centre), b1);
  s.pose = SimilarityTransform::make(1.0, 0.0, centre);
  for (std::size_t i = 0; i < model.size(); ++i) {
    s.model_points.push_back(model.keypoints[i].position - centre);
    s.current_points.push_back({model.keypoints[i].position, i});
  }
  s.model = std::move(model);
  s.current_box = b1;
  s.frame_idx = 1;
  s.lost = false;
  s.previous_frame = img;
  if (times) {
    times->detect_ms = detect_ms;
    times->extract_ms = extract_ms;
    times->keypoint_count = keypoints.size();
    times->total_ms = ms_since(t_total);
  }
  return s;
}

StepOutput tracker_step(const TrackState& state, const GrayImage& next,
                        const DescriptorExtractor& extractor, const TrackerConfig& cfg) {
  const auto t_total = Clock::now();
  StepOutput out;
  StageTimes& times = out.times;

  // (a) flow-track the current points; (b) pose from the model-anchored survivors.
  auto t = Clock::now();
  std::vector<TrackPoint> survivors;
  std::optional<SimilarityTransform> pose;
  if (!state.lost && !state.current_points.empty()) {
    std::vector<Point2> pts;
    pts.reserve(state.current_points.size());
    for (const auto& tp : state.current_points) pts.push_back(tp.position);
    const auto tracked = lk_track_points(state.previous_frame, next, pts, cfg);
    std::vector<TrackPoint> moved;
    std::vector<Correspondence> pairs;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      if (!tracked[i]) continue;
      const std::size_t idx = state.current_points[i].model_idx;
      moved.push_back({*tracked[i], idx});
      pairs.push_back({state.model_points[idx], *tracked[i]});
    }
    const PoseEstimate est = estimate_pose(pairs, cfg);
    if (est.ok) {
      pose = est.transform;
      for (const std::size_t i : est.inliers) survivors.push_back(moved[i]);
    }
  }
  times.track_ms += ms_since(t);

  // (c) re-detect in the predicted region and match against the model.
  t = Clock::now();
  const ImagePyramid pyr = build_pyramid(next, cfg.detector.octaves, cfg.detector.pyramid_scale);
  const auto keypoints = extractor.detect(pyr, cfg.detector);
  times.detect_ms = ms_since(t);
  times.keypoint_count = keypoints.size();

  t = Clock::now();
  std::optional<OrientedBox> region;
  if (pose) {
    if (const auto predicted = box_for(*pose, state.model_box)) {
      region = predicted->inflated(cfg.search_inflation);
    }
  }
  std::vector<Keypoint> candidates;
  for (const auto& kp : keypoints) {
    if (!region || point_in_box(kp.position, *region)) candidates.push_back(kp);
  }
  const DescriptorSet current = extractor.extract(pyr, candidates);
  times.extract_ms = ms_since(t);

  t = Clock::now();
  const auto matches = filter_unambiguous(brute_force_match(state.model, current, cfg.matcher));
  times.match_ms = ms_since(t);

  t = Clock::now();
  std::vector<TrackPoint> matched;
  if (pose) {
    for (const auto& m : matches) {
      const Point2 predicted = apply_transform(*pose, state.model_points[m.query_idx]);
      const Point2 observed = current.keypoints[m.train_idx].position;
      if (distance(predicted, observed) <= cfg.ransac_inlier_px) {
        matched.push_back({observed, m.query_idx});
      }
    }
    // Flow alone cannot tell the object from whatever now covers it.
    if (matched.size() < static_cast<std::size_t>(cfg.min_match_support)) {
      pose.reset();
      survivors.clear();
      matched.clear();
    }
  } else {
    std::vector<Correspondence> pairs;
    for (const auto& m : matches) {
      pairs.push_back({state.model_points[m.query_idx], current.keypoints[m.train_idx].position});
    }
    const PoseEstimate est = estimate_pose(pairs, cfg);
    if (est.ok) {
      pose = est.transform;
      for (const std::size_t i : est.inliers) {
        matched.push_back({pairs[i].image, matches[i].query_idx});
      }
    }
  }

  // (d) merge, newer matches replacing flow points of the same model index.
  std::map<std::size_t, Point2> merged;
  for (const auto& tp : survivors) merged[tp.model_idx] = tp.position;
  for (const auto& tp : matched) merged[tp.model_idx] = tp.position;

  TrackState& next_state = out.state;
  next_state.model = state.model;
  next_state.model_points = state.model_points;
  next_state.model_box = state.model_box;
  next_state.frame_idx = state.frame_idx + 1;
  next_state.previous_frame = next;
  next_state.pose = state.pose;

  std::optional<OrientedBox> box;
  if (pose) box = box_for(*pose, state.model_box);
  if (box) {
    const auto cap = static_cast<std::size_t>(cfg.detector.max_features);
    for (const auto& [idx, pos] : merged) {
      if (next_state.current_points.size() >= cap) break;
      next_state.current_points.push_back({pos, idx});
    }
    next_state.pose = *pose;
    next_state.current_box = box;
    next_state.lost = false;
  } else {
    next_state.current_box.reset();
    next_state.lost = true;
  }
  out.box = box;
  times.track_ms += ms_since(t);
  times.total_ms = ms_since(t_total);
  return out;
}

TrackingResult run_sequence(const Sequence& seq, const DescriptorExtractor& extractor,
                            const TrackerConfig& cfg) {
  TrackingResult result;
  const std::size_t n = seq.size();
  result.boxes.assign(n, std::nullopt);
  result.times.assign(n, StageTimes{});
  result.lost.assign(n, true);

  TrackState state;
  try {
    state = tracker_init(seq.frame(0), seq.box(0), extractor, cfg, &result.times[0]);
  } catch (const TrackerInitError& e) {
    result.untrackable = true;
    result.error = e.what();
    return result;
  }
  result.boxes[0] = seq.box(0);
  result.lost[0] = false;
  for (std::size_t i = 1; i < n; ++i) {
    StepOutput step = tracker_step(state, seq.frame(i), extractor, cfg);
    result.boxes[i] = step.box;
    result.times[i] = step.times;
    result.lost[i] = step.state.lost;
    state = std::move(step.state);
  }
  return result;
}

}  // namespace desctrack
