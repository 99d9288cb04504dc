#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace exprlbp {

/// Axis-aligned rectangle in pixel units; (x, y) is the top-left corner.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  [[nodiscard]] long long area() const { return static_cast<long long>(w) * h; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// 8-bit single-channel raster stored row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] bool empty() const { return pixels_.empty(); }

  [[nodiscard]] std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  /// Border-replicating read: coordinates are clamped into the image.
  [[nodiscard]] std::uint8_t clamped(int x, int y) const;

  [[nodiscard]] std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }
  [[nodiscard]] std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(pixels_).subspan(index(0, y), width_);
  }

  [[nodiscard]] Rect bounds() const { return {0, 0, width_, height_}; }
  [[nodiscard]] bool contains(const Rect& r) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Copies the sub-rectangle `r`; throws DataError if `r` leaves the image or
/// has zero area.
GrayImage crop(const GrayImage& img, const Rect& r);

/// Bilinear resampling with pixel-center alignment. Source coordinate of
/// output pixel i is (i + 0.5) * src / dst - 0.5, clamped to [0, src - 1];
/// results round to nearest, ties away from zero.
GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h);

}  // namespace exprlbp
