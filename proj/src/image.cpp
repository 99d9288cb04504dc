#include "exprlbp/image.hpp"

#include <algorithm>
#include <string>

#include "exprlbp/error.hpp"

namespace exprlbp {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw DataError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw DataError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw DataError("pixel buffer holds " + std::to_string(pixels_.size()) +
                    " values, expected " + std::to_string(static_cast<long long>(width) * height));
  }
}

std::uint8_t GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return pixels_[index(x, y)];
}

bool GrayImage::contains(const Rect& r) const {
  return r.x >= 0 && r.y >= 0 && r.w >= 0 && r.h >= 0 && r.x + r.w <= width_ &&
         r.y + r.h <= height_;
}

GrayImage crop(const GrayImage& img, const Rect& r) {
  if (!img.contains(r) || r.w == 0 || r.h == 0) {
    throw DataError("crop rect (" + std::to_string(r.x) + "," + std::to_string(r.y) + "," +
                    std::to_string(r.w) + "," + std::to_string(r.h) + ") outside " +
                    std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
  }
  GrayImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    auto src = img.row(r.y + y).subspan(r.x, r.w);
    std::copy(src.begin(), src.end(), out.pixels().begin() + static_cast<std::ptrdiff_t>(y) * r.w);
  }
  return out;
}

namespace {

// Sample position as an exact fraction (lo + frac / den) of the source grid:
// (i + 0.5) * src / dst - 0.5 = ((2i + 1) * src - dst) / (2 * dst).
struct Tap {
  int lo;
  int hi;
  long long frac;
};

std::vector<Tap> bilinear_taps(int src, int dst, long long den) {
  std::vector<Tap> taps(dst);
  const long long max_num = static_cast<long long>(src - 1) * den;
  for (int i = 0; i < dst; ++i) {
    long long num = (2LL * i + 1) * src - dst;
    num = std::clamp(num, 0LL, max_num);
    const int lo = static_cast<int>(num / den);
    taps[i] = {lo, std::min(lo + 1, src - 1), num - lo * den};
  }
  return taps;
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw DataError("resize target must be at least 1x1");
  }
  const long long den_x = 2LL * out_w;
  const long long den_y = 2LL * out_h;
  const auto xs = bilinear_taps(img.width(), out_w, den_x);
  const auto ys = bilinear_taps(img.height(), out_h, den_y);
  const long long den = den_x * den_y;
  GrayImage out(out_w, out_h);
  for (int j = 0; j < out_h; ++j) {
    const Tap& ty = ys[j];
    for (int i = 0; i < out_w; ++i) {
      const Tap& tx = xs[i];
      const long long num = (den_x - tx.frac) * (den_y - ty.frac) * img.at(tx.lo, ty.lo) +
                            tx.frac * (den_y - ty.frac) * img.at(tx.hi, ty.lo) +
                            (den_x - tx.frac) * ty.frac * img.at(tx.lo, ty.hi) +
                            tx.frac * ty.frac * img.at(tx.hi, ty.hi);
      // Nonnegative, so half-up is ties-away-from-zero.
      out.at(i, j) = static_cast<std::uint8_t>((2 * num + den) / (2 * den));
    }
  }
  return out;
}

}  // namespace exprlbp
