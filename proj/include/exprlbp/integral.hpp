#pragma once

#include <cstdint>
#include <vector>

#include "exprlbp/image.hpp"

namespace exprlbp {

/// Zero-padded (w+1) x (h+1) cumulative sum tables over intensities and
/// squared intensities. Entry (x, y) holds the sum over [0, x) x [0, y).
class IntegralImage {
 public:
  explicit IntegralImage(const GrayImage& img);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }

  [[nodiscard]] std::uint64_t sum_at(int x, int y) const { return sums_[index(x, y)]; }
  [[nodiscard]] std::uint64_t sq_sum_at(int x, int y) const { return sq_sums_[index(x, y)]; }

  /// Exact pixel sum over `r`. Throws DataError when `r` is out of bounds.
  [[nodiscard]] std::uint64_t rect_sum(const Rect& r) const;
  [[nodiscard]] std::uint64_t rect_sq_sum(const Rect& r) const;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * (width_ + 1) + x;
  }
  void check(const Rect& r) const;

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint64_t> sums_;
  std::vector<std::uint64_t> sq_sums_;
};

inline IntegralImage integral_image(const GrayImage& img) { return IntegralImage(img); }

inline std::uint64_t rect_sum(const IntegralImage& ii, const Rect& r) { return ii.rect_sum(r); }

}  // namespace exprlbp
