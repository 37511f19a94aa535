#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "desctrack/detection.hpp"
#include "desctrack/image.hpp"

namespace desctrack {

struct BinaryDescriptor {
  static constexpr std::size_t kBits = 256;
  std::array<std::uint64_t, 4> words{};

  bool bit(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }
  friend bool operator==(const BinaryDescriptor&, const BinaryDescriptor&) = default;
};

struct FloatDescriptor {
  static constexpr std::size_t kDims = 64;
  std::array<float, kDims> values{};
  /// All-zero descriptor of a patch without gradients.
  bool flat = false;
  friend bool operator==(const FloatDescriptor&, const FloatDescriptor&) = default;
};

enum class DescriptorKind { Binary, Float };

const char* to_string(DescriptorKind kind);

/// Keypoints with a parallel list of homogeneous descriptors.
struct DescriptorSet {
  std::vector<Keypoint> keypoints;
  std::variant<std::vector<BinaryDescriptor>, std::vector<FloatDescriptor>> descriptors;
  /// Input keypoints dropped because their patch left the image.
  std::size_t dropped = 0;

  DescriptorKind kind() const {
    return descriptors.index() == 0 ? DescriptorKind::Binary : DescriptorKind::Float;
  }
  std::size_t size() const { return keypoints.size(); }
  bool empty() const { return keypoints.empty(); }

  const std::vector<BinaryDescriptor>& binary() const;
  const std::vector<FloatDescriptor>& floats() const;

  static DescriptorSet make_binary(std::vector<Keypoint> kps, std::vector<BinaryDescriptor> d);
  static DescriptorSet make_float(std::vector<Keypoint> kps, std::vector<FloatDescriptor> d);

  /// Subset with the given indices, in that order.
  DescriptorSet select(std::span<const std::size_t> indices) const;
};

/// Extension point for descriptor pipelines. Implementations must preserve
/// keypoint order in extract (apart from documented drops) and be
/// deterministic for fixed inputs.
class DescriptorExtractor {
 public:
  virtual ~DescriptorExtractor() = default;

  virtual std::string name() const = 0;
  virtual DescriptorKind kind() const = 0;

  /// Defaults to detect_multiscale.
  virtual std::vector<Keypoint> detect(const ImagePyramid& pyramid,
                                       const DetectorConfig& cfg) const;
  virtual DescriptorSet extract(const ImagePyramid& pyramid,
                                std::span<const Keypoint> keypoints) const = 0;

  std::vector<Keypoint> detect(const GrayImage& img, const DetectorConfig& cfg) const;
  /// Rebuilds the pyramid implied by the keypoints' octaves and scale factors.
  DescriptorSet extract(const GrayImage& img, std::span<const Keypoint> keypoints) const;
};

/// Steered BRIEF: 256 smoothed-intensity comparisons over a fixed pattern,
/// rotated by the keypoint orientation quantized to 12 degree steps.
class OrientedBriefExtractor final : public DescriptorExtractor {
 public:
  static constexpr int kAngleBins = 30;
  static constexpr int kSmoothRadius = 2;  ///< 5x5 box filter

  std::string name() const override { return "binary256"; }
  DescriptorKind kind() const override { return DescriptorKind::Binary; }
  using DescriptorExtractor::extract;
  DescriptorSet extract(const ImagePyramid& pyramid,
                        std::span<const Keypoint> keypoints) const override;

  /// Pattern bin used for an orientation, in [0, 30).
  static int angle_bin(double orientation);
};

/// 4x4 spatial cells x 4 orientation bins over a 16x16 patch aligned with the
/// keypoint orientation; L2-normalized, clamped at 0.2, renormalized.
class GradientHistogramExtractor final : public DescriptorExtractor {
 public:
  static constexpr int kPatchSize = 16;
  static constexpr double kClamp = 0.2;

  std::string name() const override { return "gradhist64"; }
  DescriptorKind kind() const override { return DescriptorKind::Float; }
  using DescriptorExtractor::extract;
  DescriptorSet extract(const ImagePyramid& pyramid,
                        std::span<const Keypoint> keypoints) const override;
};

using ExtractorFactory = std::function<std::unique_ptr<DescriptorExtractor>()>;

/// Registers a named extractor; replaces any previous entry of that name.
void register_extractor(const std::string& name, ExtractorFactory factory);

/// Throws ConfigError listing the known names when `name` is not registered.
std::unique_ptr<DescriptorExtractor> make_extractor(const std::string& name);
std::vector<std::string> extractor_names();

}  // namespace desctrack
