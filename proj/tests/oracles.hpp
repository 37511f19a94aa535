#pragma once

// Test-side reference implementations. Each one is written from the
// definition, slow and direct, and shares no code with the library beyond the
// plain data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "desctrack/description.hpp"
#include "desctrack/detection.hpp"
#include "desctrack/evaluation.hpp"
#include "desctrack/geometry.hpp"
#include "desctrack/image.hpp"
#include "desctrack/matching.hpp"
#include "desctrack/random.hpp"

namespace oracle {

using desctrack::Point2;

/// Crossing-number test against the raw vertex loop.
inline bool inside_quad(const std::array<Point2, 4>& q, Point2 p) {
  bool in = false;
  for (std::size_t i = 0, j = 3; i < 4; j = i++) {
    const Point2 a = q[i];
    const Point2 b = q[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

/// IoU by jittered stratified sampling of the union's bounding rectangle.
inline double monte_carlo_overlap(const std::array<Point2, 4>& a, const std::array<Point2, 4>& b,
                                  std::size_t samples, std::uint64_t seed) {
  double x0 = a[0].x, x1 = a[0].x, y0 = a[0].y, y1 = a[0].y;
  for (const auto* q : {&a, &b}) {
    for (const Point2& p : *q) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  }
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  const double dx = (x1 - x0) / static_cast<double>(side);
  const double dy = (y1 - y0) / static_cast<double>(side);
  desctrack::SplitMix64 rng(seed);
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const Point2 p{x0 + (static_cast<double>(i) + rng.uniform()) * dx,
                     y0 + (static_cast<double>(j) + rng.uniform()) * dy};
      const bool ia = inside_quad(a, p);
      const bool ib = inside_quad(b, p);
      both += ia && ib;
      either += ia || ib;
    }
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

/// Rectangle of size w x h rotated by `angle` about `c`, vertices in order.
inline std::array<Point2, 4> rotated_rect(Point2 c, double w, double h, double angle) {
  const double ca = std::cos(angle), sa = std::sin(angle);
  std::array<Point2, 4> out;
  const double u[4] = {-w / 2, w / 2, w / 2, -w / 2};
  const double v[4] = {-h / 2, -h / 2, h / 2, h / 2};
  for (int i = 0; i < 4; ++i) out[i] = {c.x + ca * u[i] - sa * v[i], c.y + sa * u[i] + ca * v[i]};
  return out;
}

struct SegmentResult {
  bool corner = false;
  double response = 0.0;
};

/// Exhaustive segment test: every start position, every arc pixel compared.
inline SegmentResult segment_test(const desctrack::GrayImage& img, int x, int y, int threshold,
                                  int n) {
  const int c = img.at(x, y);
  int v[16];
  for (int i = 0; i < 16; ++i) {
    v[i] = img.at(x + desctrack::kCircleOffsets[i][0], y + desctrack::kCircleOffsets[i][1]);
  }
  for (const int sign : {+1, -1}) {
    bool member[16] = {};
    bool any = false;
    for (int s = 0; s < 16; ++s) {
      bool all = true;
      for (int k = 0; k < n; ++k) {
        const int d = v[(s + k) % 16] - c;
        if (!(sign > 0 ? d > threshold : -d > threshold)) all = false;
      }
      if (!all) continue;
      any = true;
      for (int k = 0; k < n; ++k) member[(s + k) % 16] = true;
    }
    if (any) {
      SegmentResult r{true, 0.0};
      for (int i = 0; i < 16; ++i) {
        if (member[i]) r.response += std::abs(v[i] - c);
      }
      return r;
    }
  }
  return {};
}

inline int popcount_naive(std::uint64_t w) {
  int n = 0;
  for (int b = 0; b < 64; ++b) n += static_cast<int>((w >> b) & 1u);
  return n;
}

inline double descriptor_distance(const desctrack::DescriptorSet& a, std::size_t i,
                                  const desctrack::DescriptorSet& b, std::size_t j) {
  if (a.kind() == desctrack::DescriptorKind::Binary) {
    int d = 0;
    for (int w = 0; w < 4; ++w) d += popcount_naive(a.binary()[i].words[w] ^ b.binary()[j].words[w]);
    return d;
  }
  double s = 0.0;
  for (std::size_t k = 0; k < 64; ++k) {
    const double d = double(a.floats()[i].values[k]) - double(b.floats()[j].values[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

/// Double loop: nearest, second nearest (by a second full scan), lowest index
/// on ties, ratio rule, optional mutual check.
inline std::vector<desctrack::MatchRecord> naive_match(const desctrack::DescriptorSet& q,
                                                       const desctrack::DescriptorSet& t,
                                                       const desctrack::MatcherConfig& cfg) {
  std::vector<desctrack::MatchRecord> out;
  if (t.size() == 0) return out;
  auto nearest_train = [&](std::size_t i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < t.size(); ++j) {
      if (descriptor_distance(q, i, t, j) < descriptor_distance(q, i, t, best)) best = j;
    }
    return best;
  };
  for (std::size_t i = 0; i < q.size(); ++i) {
    const std::size_t best = nearest_train(i);
    desctrack::MatchRecord m;
    m.query_idx = i;
    m.train_idx = best;
    m.best_distance = descriptor_distance(q, i, t, best);
    std::optional<double> second;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j == best) continue;
      const double d = descriptor_distance(q, i, t, j);
      if (!second || d < *second) second = d;
    }
    m.second_distance = second;
    if (!second) {
      m.ambiguous = !cfg.single_candidate_unambiguous;
    } else if (*second == 0.0) {
      m.ambiguous = true;
    } else {
      m.ambiguous = m.best_distance / *second >= cfg.rho;
    }
    if (cfg.cross_check) {
      std::size_t back = 0;
      for (std::size_t k = 1; k < q.size(); ++k) {
        if (descriptor_distance(q, k, t, best) < descriptor_distance(q, back, t, best)) back = k;
      }
      if (back != i) continue;
    }
    out.push_back(m);
  }
  return out;
}

/// TP/FP/FN case table written out per quadrant.
inline desctrack::MatchLabel label(bool first_inside, bool current_inside) {
  using L = desctrack::MatchLabel;
  if (first_inside && current_inside) return L::TruePositive;
  if (first_inside && !current_inside) return L::FalsePositive;
  if (!first_inside && current_inside) return L::FalseNegative;
  return L::Unlabeled;
}

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

/// Two-pass sample mean and unbiased variance.
inline MeanVar two_pass(const std::vector<double>& v) {
  MeanVar r;
  for (const double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return r;
  for (const double x : v) r.variance += (x - r.mean) * (x - r.mean);
  r.variance /= static_cast<double>(v.size() - 1);
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const MeanVar ma = two_pass(a), mb = two_pass(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma.mean) * (b[i] - mb.mean);
  s /= static_cast<double>(a.size() - 1);
  return s / std::sqrt(ma.variance * mb.variance);
}

/// Seeded image with sharp blocks over noise; rich in corners.
inline desctrack::GrayImage random_blocks(int w, int h, std::uint64_t seed, int cell = 4) {
  desctrack::SplitMix64 rng(seed);
  std::vector<std::uint8_t> lattice(static_cast<std::size_t>((w / cell + 2) * (h / cell + 2)));
  for (auto& v : lattice) v = static_cast<std::uint8_t>(rng.below(256));
  desctrack::GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y) = lattice[static_cast<std::size_t>((y / cell) * (w / cell + 2) + x / cell)];
    }
  }
  return img;
}

/// Smooth seeded texture: a sum of oriented sinusoids with random phases.
inline desctrack::GrayImage smooth_texture(int w, int h, std::uint64_t seed) {
  desctrack::SplitMix64 rng(seed);
  struct Wave { double kx, ky, phase, amp; };
  std::vector<Wave> waves;
  for (int i = 0; i < 12; ++i) {
    const double period = rng.uniform(8.0, 24.0);
    const double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
    waves.push_back({std::cos(dir) * 2 * std::numbers::pi / period, std::sin(dir) * 2 * std::numbers::pi / period,
                     rng.uniform(0.0, 2 * std::numbers::pi), rng.uniform(0.5, 1.0)});
  }
  desctrack::GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0, norm = 0.0;
      for (const auto& wv : waves) {
        s += wv.amp * std::sin(wv.kx * x + wv.ky * y + wv.phase);
        norm += wv.amp;
      }
      img.at(x, y) = desctrack::saturate_u8(128.0 + 110.0 * s / norm * 2.0);
    }
  }
  return img;
}

}  // namespace oracle
