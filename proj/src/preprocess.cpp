#include "exprlbp/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "exprlbp/error.hpp"

namespace exprlbp {

void BilateralParams::validate() const {
  if (radius < 1) throw DataError("bilateral radius must be >= 1");
  if (!(sigma_spatial > 0.0) || !std::isfinite(sigma_spatial)) {
    throw DataError("bilateral sigma_spatial must be > 0");
  }
  if (!(sigma_range > 0.0) || !std::isfinite(sigma_range)) {
    throw DataError("bilateral sigma_range must be > 0");
  }
}

void PreprocessConfig::validate() const {
  if (face_w < 8 || face_h < 8) {
    throw DataError("face size must be at least 8x8, got " + std::to_string(face_w) + "x" +
                    std::to_string(face_h));
  }
  bilateral.validate();
}

namespace {

constexpr long long kParallelMinPixels = 128 * 128;

class BilateralKernel {
 public:
  explicit BilateralKernel(const BilateralParams& p) : radius_(p.radius) {
    p.validate();
    const int side = 2 * radius_ + 1;
    spatial_.resize(static_cast<std::size_t>(side) * side);
    for (int dy = -radius_; dy <= radius_; ++dy) {
      for (int dx = -radius_; dx <= radius_; ++dx) {
        const double d2 = dx * dx + dy * dy;
        spatial_[tap(dx, dy)] = std::exp(-d2 / (2.0 * p.sigma_spatial * p.sigma_spatial));
      }
    }
    for (int di = 0; di < 256; ++di) {
      const double d2 = static_cast<double>(di) * di;
      range_[di] = std::exp(-d2 / (2.0 * p.sigma_range * p.sigma_range));
    }
  }

  [[nodiscard]] std::uint8_t apply(const GrayImage& img, int x, int y) const {
    const int center = img.at(x, y);
    double acc = 0.0;
    double norm = 0.0;
    for (int dy = -radius_; dy <= radius_; ++dy) {
      for (int dx = -radius_; dx <= radius_; ++dx) {
        const int v = img.clamped(x + dx, y + dy);
        const double w = spatial_[tap(dx, dy)] * range_[std::abs(v - center)];
        acc += w * v;
        norm += w;
      }
    }
    // The center tap has weight 1, so norm >= 1.
    return static_cast<std::uint8_t>(std::clamp(std::lround(acc / norm), 0L, 255L));
  }

 private:
  [[nodiscard]] std::size_t tap(int dx, int dy) const {
    return static_cast<std::size_t>(dy + radius_) * (2 * radius_ + 1) + (dx + radius_);
  }

  int radius_;
  std::vector<double> spatial_;
  std::array<double, 256> range_{};
};

}  // namespace

GrayImage bilateral_filter(const GrayImage& img, const BilateralParams& p) {
  const BilateralKernel kernel(p);
  GrayImage out(img.width(), img.height());
  const int h = img.height();
  const int w = img.width();
  const bool parallel = static_cast<long long>(w) * h >= kParallelMinPixels;
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = kernel.apply(img, x, y);
  }
  return out;
}

namespace serial {

GrayImage bilateral_filter(const GrayImage& img, const BilateralParams& p) {
  const BilateralKernel kernel(p);
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = kernel.apply(img, x, y);
  }
  return out;
}

}  // namespace serial

GrayImage preprocess_face(const GrayImage& img, const Rect& face, const PreprocessConfig& cfg) {
  cfg.validate();
  return bilateral_filter(resize_bilinear(crop(img, face), cfg.face_w, cfg.face_h),
                          cfg.bilateral);
}

}  // namespace exprlbp
