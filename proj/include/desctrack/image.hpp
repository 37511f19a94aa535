#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace desctrack {

/// Single-channel 8-bit raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0)
      : width_(checked(width)), height_(checked(height)),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}
  GrayImage(int width, int height, std::vector<std::uint8_t> data)
      : width_(checked(width)), height_(checked(height)), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw std::invalid_argument("image data length does not match dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return data_[index(x, y)]; }

  /// Replicates the border for out-of-range coordinates.
  std::uint8_t clamped(int x, int y) const {
    x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
    y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
    return data_[index(x, y)];
  }

  /// Bilinear sample at continuous pixel coordinates, border replicated.
  double bilinear(double x, double y) const;

  bool contains(double x, double y) const noexcept {
    return x >= 0.0 && y >= 0.0 && x <= width_ - 1 && y <= height_ - 1;
  }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  std::vector<std::uint8_t>& data() noexcept { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  static int checked(int v) {
    if (v <= 0) throw std::invalid_argument("image dimensions must be positive");
    return v;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

inline double GrayImage::bilinear(double x, double y) const {
  const double fx = x < 0.0 ? 0.0 : (x > width_ - 1 ? width_ - 1 : x);
  const double fy = y < 0.0 ? 0.0 : (y > height_ - 1 ? height_ - 1 : y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const int x1 = x0 + 1 < width_ ? x0 + 1 : x0;
  const int y1 = y0 + 1 < height_ ? y0 + 1 : y0;
  const double ax = fx - x0;
  const double ay = fy - y0;
  const double top = (1.0 - ax) * at(x0, y0) + ax * at(x1, y0);
  const double bottom = (1.0 - ax) * at(x0, y1) + ax * at(x1, y1);
  return (1.0 - ay) * top + ay * bottom;
}

/// Rounds and clamps a real intensity into [0, 255].
inline std::uint8_t saturate_u8(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace desctrack
