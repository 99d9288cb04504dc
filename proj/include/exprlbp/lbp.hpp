#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exprlbp/image.hpp"

namespace exprlbp {

/// Neighbor order for lbp_code: clockwise from the top-left, bit n gets 2^n.
///   0 1 2
///   7 c 3
///   6 5 4
inline constexpr std::array<std::array<int, 2>, 8> kLbpOffsets{{
    {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}}};

/// sum over n of s(neighbor_n - center) * 2^n with s(x) = 1 for x >= 0.
constexpr std::uint8_t lbp_code(std::uint8_t center, const std::array<std::uint8_t, 8>& neighbors) {
  unsigned code = 0;
  for (unsigned n = 0; n < 8; ++n) {
    if (neighbors[n] >= center) code |= 1u << n;
  }
  return static_cast<std::uint8_t>(code);
}

/// Per-pixel LBP codes, same geometry as the source image.
class LbpMap {
 public:
  LbpMap(int width, int height) : width_(width), height_(height),
      codes_(static_cast<std::size_t>(width) * height, 0) {}

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] std::uint8_t at(int x, int y) const { return codes_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return codes_[index(x, y)]; }
  [[nodiscard]] std::span<const std::uint8_t> codes() const { return codes_; }

  friend bool operator==(const LbpMap&, const LbpMap&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> codes_;
};

/// LBP code of every pixel; neighbors outside the image read the nearest
/// edge pixel.
LbpMap lbp_map(const GrayImage& img);

/// One level of the multi-block descriptor: block size n x m and bin count b.
struct BlockSpec {
  int block_h = 0;
  int block_w = 0;
  int bins = 0;

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

struct FeatureConfig {
  int face_w = 40;
  int face_h = 40;
  std::vector<BlockSpec> levels{{6, 6, 8}, {8, 10, 16}};

  /// Throws DataError unless every level fits the face and bins are in 1..256.
  void validate() const;
  /// Stable textual identity, e.g. "40x40:6x6x8,8x10x16".
  [[nodiscard]] std::string id() const;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

struct FeatureVector {
  std::vector<double> values;
  std::string config_id;
};

/// Row-major grid of floor(h / block_h) x floor(w / block_w) blocks. The last
/// block in each row and column absorbs the remainder pixels.
std::vector<Rect> block_partition(int w, int h, const BlockSpec& spec);

/// L1-normalized histogram of the codes in `r`; code v lands in bin
/// floor(v * bins / 256).
std::vector<double> block_histogram(const LbpMap& map, const Rect& r, int bins);

/// Sum over levels of blocks * bins.
std::size_t feature_dim(const FeatureConfig& cfg);

/// Concatenated per-block histograms, levels in order, blocks row-major.
FeatureVector extract_features(const GrayImage& face, const FeatureConfig& cfg);

/// extract_features over a batch, images distributed across OpenMP threads.
std::vector<FeatureVector> extract_features_batch(std::span<const GrayImage> faces,
                                                  const FeatureConfig& cfg);

namespace serial {

LbpMap lbp_map(const GrayImage& img);
std::vector<FeatureVector> extract_features_batch(std::span<const GrayImage> faces,
                                                  const FeatureConfig& cfg);

}  // namespace serial

}  // namespace exprlbp
