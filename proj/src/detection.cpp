#include "desctrack/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "desctrack/errors.hpp"

namespace desctrack {

int Keypoint::level_x() const { return static_cast<int>(std::lround(position.x / scale_factor)); }
int Keypoint::level_y() const { return static_cast<int>(std::lround(position.y / scale_factor)); }

void DetectorConfig::validate() const {
  if (max_features <= 0) throw ConfigError("detector.max_features must be > 0");
  if (octaves < 1) throw ConfigError("detector.octaves must be >= 1");
  if (arc_length < 9 || arc_length > 16) throw ConfigError("detector.arc_length must be in [9, 16]");
  if (fast_threshold < 0 || fast_threshold > 255) {
    throw ConfigError("detector.fast_threshold must be in [0, 255]");
  }
  if (nms_radius < 0) throw ConfigError("detector.nms_radius must be >= 0");
  if (!(pyramid_scale > 1.0)) throw ConfigError("detector.pyramid_scale must be > 1");
}

double ImagePyramid::level_scale(int level) const { return std::pow(scale, level); }

std::vector<std::pair<int, int>> pyramid_dimensions(int width, int height, int octaves,
                                                    double scale) {
  if (width < kMinPyramidLevelSize || height < kMinPyramidLevelSize) {
    throw std::invalid_argument("image smaller than 32x32: " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  std::vector<std::pair<int, int>> dims{{width, height}};
  for (int l = 1; l < octaves; ++l) {
    const auto [pw, ph] = dims.back();
    const int w = static_cast<int>(std::lround(pw / scale));
    const int h = static_cast<int>(std::lround(ph / scale));
    if (w < kMinPyramidLevelSize || h < kMinPyramidLevelSize) break;
    dims.emplace_back(w, h);
  }
  return dims;
}

namespace {

GrayImage binomial_blur(const GrayImage& src) {
  static constexpr int k[5] = {1, 4, 6, 4, 1};
  const int w = src.width();
  const int h = src.height();
  std::vector<int> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int s = 0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * src.clamped(x + i, y);
      tmp[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int s = 0;
      for (int i = -2; i <= 2; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        s += k[i + 2] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out.at(x, y) = static_cast<std::uint8_t>((s + 128) / 256);
    }
  }
  return out;
}

}  // namespace

ImagePyramid build_pyramid(const GrayImage& img, int octaves, double scale) {
  if (octaves < 1) throw std::invalid_argument("octave count must be >= 1");
  if (!(scale > 1.0)) throw std::invalid_argument("pyramid scale must be > 1");
  const auto dims = pyramid_dimensions(img.width(), img.height(), octaves, scale);
  ImagePyramid pyr;
  pyr.scale = scale;
  pyr.levels.reserve(dims.size());
  pyr.levels.push_back(img);
  for (std::size_t l = 1; l < dims.size(); ++l) {
    const GrayImage blurred = binomial_blur(pyr.levels.back());
    const auto [w, h] = dims[l];
    GrayImage level(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        level.at(x, y) = saturate_u8(blurred.bilinear(x * scale, y * scale));
      }
    }
    pyr.levels.push_back(std::move(level));
  }
  return pyr;
}

std::vector<Corner> fast_detect(const GrayImage& img, int threshold, int arc_length) {
  std::vector<Corner> out;
  const int w = img.width();
  const int h = img.height();
  if (w < 7 || h < 7) return out;

  int offsets[16];
  for (int i = 0; i < 16; ++i) offsets[i] = kCircleOffsets[i][1] * w + kCircleOffsets[i][0];
  const std::uint8_t* data = img.data().data();

  auto window_starts = [arc_length](std::uint32_t mask) {
    const std::uint32_t doubled = mask | (mask << 16);
    std::uint32_t r = doubled;
    for (int k = 1; k < arc_length; ++k) r &= doubled >> k;
    return r & 0xFFFFu;
  };

  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const std::uint8_t* p = data + static_cast<std::ptrdiff_t>(y) * w + x;
      const int centre = *p;
      const int hi = centre + threshold;
      const int lo = centre - threshold;
      std::uint32_t bright = 0;
      std::uint32_t dark = 0;
      for (int i = 0; i < 16; ++i) {
        const int v = p[offsets[i]];
        bright |= static_cast<std::uint32_t>(v > hi) << i;
        dark |= static_cast<std::uint32_t>(v < lo) << i;
      }
      std::uint32_t starts = window_starts(bright);
      if (starts == 0) starts = window_starts(dark);
      if (starts == 0) continue;

      // At most one qualifying run exists since 2 * arc_length > 16.
      std::uint32_t arc = 0;
      for (int i = 0; i < 16; ++i) {
        if (!(starts >> i & 1u)) continue;
        for (int k = 0; k < arc_length; ++k) arc |= 1u << ((i + k) % 16);
      }
      int response = 0;
      for (int i = 0; i < 16; ++i) {
        if (arc >> i & 1u) response += std::abs(p[offsets[i]] - centre);
      }
      out.push_back({Point2{double(x), double(y)}, static_cast<double>(response)});
    }
  }
  return out;
}

std::vector<Corner> nonmax_suppress(const std::vector<Corner>& candidates, int radius) {
  if (radius < 0) throw std::invalid_argument("nms radius must be >= 0");
  const double cell = radius + 1.0;
  std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
  auto key = [cell](Point2 p) {
    return std::pair<long, long>{static_cast<long>(std::floor(p.x / cell)),
                                 static_cast<long>(std::floor(p.y / cell))};
  };
  for (std::size_t i = 0; i < candidates.size(); ++i) grid[key(candidates[i].position)].push_back(i);

  auto beats = [&](std::size_t a, std::size_t b) {
    const Corner& ca = candidates[a];
    const Corner& cb = candidates[b];
    if (ca.response != cb.response) return ca.response > cb.response;
    if (ca.position.y != cb.position.y) return ca.position.y < cb.position.y;
    if (ca.position.x != cb.position.x) return ca.position.x < cb.position.x;
    return a < b;
  };

  std::vector<Corner> kept;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Point2 p = candidates[i].position;
    const auto [cx, cy] = key(p);
    bool keep = true;
    for (long gy = cy - 1; gy <= cy + 1 && keep; ++gy) {
      for (long gx = cx - 1; gx <= cx + 1 && keep; ++gx) {
        const auto it = grid.find({gx, gy});
        if (it == grid.end()) continue;
        for (const std::size_t j : it->second) {
          if (j == i) continue;
          const Point2 q = candidates[j].position;
          if (std::max(std::abs(p.x - q.x), std::abs(p.y - q.y)) > radius) continue;
          if (!beats(i, j)) {
            keep = false;
            break;
          }
        }
      }
    }
    if (keep) kept.push_back(candidates[i]);
  }
  return kept;
}

double orientation_intensity_centroid(const GrayImage& img, Point2 p, int patch_radius) {
  const int cx = static_cast<int>(std::lround(p.x));
  const int cy = static_cast<int>(std::lround(p.y));
  const int r2 = patch_radius * patch_radius;
  std::int64_t m10 = 0;
  std::int64_t m01 = 0;
  for (int dy = -patch_radius; dy <= patch_radius; ++dy) {
    for (int dx = -patch_radius; dx <= patch_radius; ++dx) {
      if (dx * dx + dy * dy > r2) continue;
      const int v = img.clamped(cx + dx, cy + dy);
      m10 += static_cast<std::int64_t>(dx) * v;
      m01 += static_cast<std::int64_t>(dy) * v;
    }
  }
  if (m10 == 0 && m01 == 0) return 0.0;
  return normalize_angle(std::atan2(static_cast<double>(m01), static_cast<double>(m10)));
}

std::vector<Keypoint> detect_multiscale(const ImagePyramid& pyramid, const DetectorConfig& cfg) {
  cfg.validate();
  std::vector<Keypoint> all;
  const int levels = std::min<int>(cfg.octaves, static_cast<int>(pyramid.levels.size()));
  for (int l = 0; l < levels; ++l) {
    const GrayImage& level = pyramid.levels[static_cast<std::size_t>(l)];
    const double s = pyramid.level_scale(l);
    const auto corners =
        nonmax_suppress(fast_detect(level, cfg.fast_threshold, cfg.arc_length), cfg.nms_radius);
    for (const auto& c : corners) {
      const int x = static_cast<int>(c.position.x);
      const int y = static_cast<int>(c.position.y);
      if (x < kKeypointBorder || y < kKeypointBorder || x > level.width() - 1 - kKeypointBorder ||
          y > level.height() - 1 - kKeypointBorder) {
        continue;
      }
      Keypoint kp;
      kp.position = Point2{x * s, y * s};
      kp.octave = l;
      kp.response = c.response;
      kp.orientation = orientation_intensity_centroid(level, c.position);
      kp.scale_factor = s;
      all.push_back(kp);
    }
  }
  std::sort(all.begin(), all.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.octave != b.octave) return a.octave < b.octave;
    if (a.position.y != b.position.y) return a.position.y < b.position.y;
    return a.position.x < b.position.x;
  });
  if (all.size() > static_cast<std::size_t>(cfg.max_features)) {
    all.resize(static_cast<std::size_t>(cfg.max_features));
  }
  return all;
}

std::vector<Keypoint> detect_multiscale(const GrayImage& img, const DetectorConfig& cfg) {
  cfg.validate();
  return detect_multiscale(build_pyramid(img, cfg.octaves, cfg.pyramid_scale), cfg);
}

}  // namespace desctrack
