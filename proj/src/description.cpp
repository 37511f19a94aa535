#include "desctrack/description.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>

#include "desctrack/brief_pattern.hpp"
#include "desctrack/errors.hpp"

namespace desctrack {

const char* to_string(DescriptorKind kind) {
  return kind == DescriptorKind::Binary ? "binary" : "float";
}

const std::vector<BinaryDescriptor>& DescriptorSet::binary() const {
  if (const auto* d = std::get_if<std::vector<BinaryDescriptor>>(&descriptors)) return *d;
  throw std::invalid_argument("descriptor set holds float descriptors");
}

const std::vector<FloatDescriptor>& DescriptorSet::floats() const {
  if (const auto* d = std::get_if<std::vector<FloatDescriptor>>(&descriptors)) return *d;
  throw std::invalid_argument("descriptor set holds binary descriptors");
}

DescriptorSet DescriptorSet::make_binary(std::vector<Keypoint> kps,
                                         std::vector<BinaryDescriptor> d) {
  if (kps.size() != d.size()) throw std::invalid_argument("keypoint/descriptor count mismatch");
  DescriptorSet s;
  s.keypoints = std::move(kps);
  s.descriptors = std::move(d);
  return s;
}

DescriptorSet DescriptorSet::make_float(std::vector<Keypoint> kps,
                                        std::vector<FloatDescriptor> d) {
  if (kps.size() != d.size()) throw std::invalid_argument("keypoint/descriptor count mismatch");
  DescriptorSet s;
  s.keypoints = std::move(kps);
  s.descriptors = std::move(d);
  return s;
}

DescriptorSet DescriptorSet::select(std::span<const std::size_t> indices) const {
  DescriptorSet out;
  out.keypoints.reserve(indices.size());
  for (const std::size_t i : indices) out.keypoints.push_back(keypoints.at(i));
  std::visit(
      [&](const auto& src) {
        std::decay_t<decltype(src)> dst;
        dst.reserve(indices.size());
        for (const std::size_t i : indices) dst.push_back(src.at(i));
        out.descriptors = std::move(dst);
      },
      descriptors);
  return out;
}

std::vector<Keypoint> DescriptorExtractor::detect(const ImagePyramid& pyramid,
                                                  const DetectorConfig& cfg) const {
  return detect_multiscale(pyramid, cfg);
}

std::vector<Keypoint> DescriptorExtractor::detect(const GrayImage& img,
                                                  const DetectorConfig& cfg) const {
  cfg.validate();
  return detect(build_pyramid(img, cfg.octaves, cfg.pyramid_scale), cfg);
}

DescriptorSet DescriptorExtractor::extract(const GrayImage& img,
                                           std::span<const Keypoint> keypoints) const {
  int octaves = 1;
  double scale = std::numbers::sqrt2;
  for (const auto& kp : keypoints) {
    octaves = std::max(octaves, kp.octave + 1);
    if (kp.octave > 0) scale = std::pow(kp.scale_factor, 1.0 / kp.octave);
  }
  return extract(build_pyramid(img, octaves, scale), keypoints);
}

namespace {

/// Level index and integer level coordinates, or nullopt if the footprint of
/// `margin` pixels leaves the level.
struct LevelPoint {
  const GrayImage* level;
  std::size_t index;
  int x;
  int y;
};

std::optional<LevelPoint> locate(const ImagePyramid& pyr, const Keypoint& kp, int margin) {
  if (kp.octave < 0 || static_cast<std::size_t>(kp.octave) >= pyr.levels.size()) {
    return std::nullopt;
  }
  const GrayImage& level = pyr.levels[static_cast<std::size_t>(kp.octave)];
  const int x = kp.level_x();
  const int y = kp.level_y();
  if (x - margin < 0 || y - margin < 0 || x + margin > level.width() - 1 ||
      y + margin > level.height() - 1) {
    return std::nullopt;
  }
  return LevelPoint{&level, static_cast<std::size_t>(kp.octave), x, y};
}

class IntegralImage {
 public:
  explicit IntegralImage(const GrayImage& img)
      : w_(img.width() + 1), sums_(static_cast<std::size_t>(w_) * (img.height() + 1), 0) {
    for (int y = 0; y < img.height(); ++y) {
      std::uint32_t row = 0;
      for (int x = 0; x < img.width(); ++x) {
        row += img.at(x, y);
        sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + row;
      }
    }
  }
  /// Sum over the inclusive rectangle [x0, x1] x [y0, y1].
  std::uint32_t box(int x0, int y0, int x1, int y1) const {
    return sums_[idx(x1 + 1, y1 + 1)] - sums_[idx(x0, y1 + 1)] - sums_[idx(x1 + 1, y0)] +
           sums_[idx(x0, y0)];
  }

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x);
  }
  int w_;
  std::vector<std::uint32_t> sums_;
};

using RotatedPattern = std::array<std::array<int, 4>, 256>;

const std::array<RotatedPattern, OrientedBriefExtractor::kAngleBins>& rotated_patterns() {
  static const auto table = [] {
    std::array<RotatedPattern, OrientedBriefExtractor::kAngleBins> t{};
    for (int b = 0; b < OrientedBriefExtractor::kAngleBins; ++b) {
      const double a = 2.0 * std::numbers::pi * b / OrientedBriefExtractor::kAngleBins;
      const double c = std::cos(a);
      const double s = std::sin(a);
      for (std::size_t i = 0; i < 256; ++i) {
        for (int k = 0; k < 2; ++k) {
          const double px = kBriefPattern[i][2 * k];
          const double py = kBriefPattern[i][2 * k + 1];
          t[b][i][2 * k] = static_cast<int>(std::lround(c * px - s * py));
          t[b][i][2 * k + 1] = static_cast<int>(std::lround(s * px + c * py));
        }
      }
    }
    return t;
  }();
  return table;
}

}  // namespace

int OrientedBriefExtractor::angle_bin(double orientation) {
  const double step = 2.0 * std::numbers::pi / kAngleBins;
  long bin = std::lround(orientation / step) % kAngleBins;
  if (bin < 0) bin += kAngleBins;
  return static_cast<int>(bin);
}

DescriptorSet OrientedBriefExtractor::extract(const ImagePyramid& pyramid,
                                              std::span<const Keypoint> keypoints) const {
  std::vector<std::optional<IntegralImage>> integrals(pyramid.levels.size());
  const auto& patterns = rotated_patterns();

  std::vector<Keypoint> kept;
  std::vector<BinaryDescriptor> descs;
  kept.reserve(keypoints.size());
  descs.reserve(keypoints.size());
  std::size_t dropped = 0;
  for (const auto& kp : keypoints) {
    const auto loc = locate(pyramid, kp, kKeypointBorder);
    if (!loc) {
      ++dropped;
      continue;
    }
    auto& integral = integrals[loc->index];
    if (!integral) integral.emplace(*loc->level);
    const auto& pattern = patterns[static_cast<std::size_t>(angle_bin(kp.orientation))];
    auto smoothed = [&](int dx, int dy) {
      const int x = loc->x + dx;
      const int y = loc->y + dy;
      return integral->box(x - kSmoothRadius, y - kSmoothRadius, x + kSmoothRadius,
                           y + kSmoothRadius);
    };
    BinaryDescriptor d;
    for (std::size_t i = 0; i < 256; ++i) {
      const auto& p = pattern[i];
      if (smoothed(p[0], p[1]) < smoothed(p[2], p[3])) d.set(i);
    }
    kept.push_back(kp);
    descs.push_back(d);
  }
  auto out = DescriptorSet::make_binary(std::move(kept), std::move(descs));
  out.dropped = dropped;
  return out;
}

DescriptorSet GradientHistogramExtractor::extract(const ImagePyramid& pyramid,
                                                  std::span<const Keypoint> keypoints) const {
  constexpr int kCells = 4;
  constexpr int kBins = 4;
  constexpr double kSigma = 0.5 * kPatchSize;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  std::vector<Keypoint> kept;
  std::vector<FloatDescriptor> descs;
  std::size_t dropped = 0;
  for (const auto& kp : keypoints) {
    const auto loc = locate(pyramid, kp, kKeypointBorder);
    if (!loc) {
      ++dropped;
      continue;
    }
    const GrayImage& img = *loc->level;
    const double c = std::cos(kp.orientation);
    const double s = std::sin(kp.orientation);
    std::array<double, FloatDescriptor::kDims> hist{};

    for (int j = 0; j < kPatchSize; ++j) {
      for (int i = 0; i < kPatchSize; ++i) {
        const double u = i - 0.5 * (kPatchSize - 1);
        const double v = j - 0.5 * (kPatchSize - 1);
        const double x = loc->x + c * u - s * v;
        const double y = loc->y + s * u + c * v;
        const double gx = 0.5 * (img.bilinear(x + 1, y) - img.bilinear(x - 1, y));
        const double gy = 0.5 * (img.bilinear(x, y + 1) - img.bilinear(x, y - 1));
        // Gradient expressed in the keypoint frame.
        const double gu = c * gx + s * gy;
        const double gv = -s * gx + c * gy;
        const double mag = std::hypot(gu, gv);
        if (mag == 0.0) continue;
        const double weight = mag * std::exp(-(u * u + v * v) / (2.0 * kSigma * kSigma));

        double angle = std::atan2(gv, gu);
        if (angle < 0) angle += two_pi;
        const double ob = angle * kBins / two_pi;
        const double cx = (i + 0.5) / (kPatchSize / kCells) - 0.5;
        const double cy = (j + 0.5) / (kPatchSize / kCells) - 0.5;
        const int cx0 = static_cast<int>(std::floor(cx));
        const int cy0 = static_cast<int>(std::floor(cy));
        const int ob0 = static_cast<int>(std::floor(ob));
        const double fx = cx - cx0;
        const double fy = cy - cy0;
        const double fo = ob - ob0;
        for (int dy = 0; dy <= 1; ++dy) {
          const int yy = cy0 + dy;
          if (yy < 0 || yy >= kCells) continue;
          const double wy = dy ? fy : 1.0 - fy;
          for (int dx = 0; dx <= 1; ++dx) {
            const int xx = cx0 + dx;
            if (xx < 0 || xx >= kCells) continue;
            const double wx = dx ? fx : 1.0 - fx;
            for (int dob = 0; dob <= 1; ++dob) {
              const int oo = ((ob0 + dob) % kBins + kBins) % kBins;
              const double wo = dob ? fo : 1.0 - fo;
              hist[static_cast<std::size_t>((yy * kCells + xx) * kBins + oo)] +=
                  weight * wx * wy * wo;
            }
          }
        }
      }
    }

    FloatDescriptor d;
    double norm = 0.0;
    for (const double h : hist) norm += h * h;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      d.flat = true;
    } else {
      double renorm = 0.0;
      for (auto& h : hist) {
        h = std::min(h / norm, kClamp);
        renorm += h * h;
      }
      renorm = std::sqrt(renorm);
      for (std::size_t k = 0; k < hist.size(); ++k) {
        d.values[k] = static_cast<float>(hist[k] / renorm);
      }
    }
    kept.push_back(kp);
    descs.push_back(d);
  }
  auto out = DescriptorSet::make_float(std::move(kept), std::move(descs));
  out.dropped = dropped;
  return out;
}

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, ExtractorFactory> factories{
      {"binary256", [] { return std::make_unique<OrientedBriefExtractor>(); }},
      {"gradhist64", [] { return std::make_unique<GradientHistogramExtractor>(); }},
  };
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_extractor(const std::string& name, ExtractorFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.factories[name] = std::move(factory);
}

std::vector<std::string> extractor_names() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> names;
  for (const auto& [name, _] : r.factories) names.push_back(name);
  return names;
}

std::unique_ptr<DescriptorExtractor> make_extractor(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  const auto it = r.factories.find(name);
  if (it == r.factories.end()) {
    std::string known;
    for (const auto& [n, _] : r.factories) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown descriptor '" + name + "' (known: " + known + ")");
  }
  return it->second();
}

}  // namespace desctrack
