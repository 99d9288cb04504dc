#include "exprlbp/integral.hpp"

#include <string>

#include "exprlbp/error.hpp"

namespace exprlbp {

IntegralImage::IntegralImage(const GrayImage& img)
    : width_(img.width()),
      height_(img.height()),
      sums_(static_cast<std::size_t>(img.width() + 1) * (img.height() + 1), 0),
      sq_sums_(sums_.size(), 0) {
  for (int y = 0; y < height_; ++y) {
    std::uint64_t row = 0;
    std::uint64_t row_sq = 0;
    for (int x = 0; x < width_; ++x) {
      const std::uint64_t v = img.at(x, y);
      row += v;
      row_sq += v * v;
      sums_[index(x + 1, y + 1)] = sums_[index(x + 1, y)] + row;
      sq_sums_[index(x + 1, y + 1)] = sq_sums_[index(x + 1, y)] + row_sq;
    }
  }
}

void IntegralImage::check(const Rect& r) const {
  if (r.x < 0 || r.y < 0 || r.w < 0 || r.h < 0 || r.x + r.w > width_ || r.y + r.h > height_) {
    throw DataError("rect (" + std::to_string(r.x) + "," + std::to_string(r.y) + "," +
                    std::to_string(r.w) + "," + std::to_string(r.h) +
                    ") outside integral image " + std::to_string(width_) + "x" +
                    std::to_string(height_));
  }
}

std::uint64_t IntegralImage::rect_sum(const Rect& r) const {
  check(r);
  // Unsigned wraparound cancels exactly: the true result is nonnegative.
  return sums_[index(r.x + r.w, r.y + r.h)] - sums_[index(r.x + r.w, r.y)] -
         sums_[index(r.x, r.y + r.h)] + sums_[index(r.x, r.y)];
}

std::uint64_t IntegralImage::rect_sq_sum(const Rect& r) const {
  check(r);
  return sq_sums_[index(r.x + r.w, r.y + r.h)] - sq_sums_[index(r.x + r.w, r.y)] -
         sq_sums_[index(r.x, r.y + r.h)] + sq_sums_[index(r.x, r.y)];
}

}  // namespace exprlbp
