#include "exprlbp/lbp.hpp"

#include <algorithm>
#include <string>

#include "exprlbp/error.hpp"

namespace exprlbp {

namespace {

constexpr long long kParallelMinPixels = 128 * 128;

std::uint8_t code_at(const GrayImage& img, int x, int y) {
  std::array<std::uint8_t, 8> nb{};
  for (std::size_t n = 0; n < 8; ++n) {
    nb[n] = img.clamped(x + kLbpOffsets[n][0], y + kLbpOffsets[n][1]);
  }
  return lbp_code(img.at(x, y), nb);
}

}  // namespace

LbpMap lbp_map(const GrayImage& img) {
  LbpMap map(img.width(), img.height());
  const int w = img.width();
  const int h = img.height();
  const bool parallel = static_cast<long long>(w) * h >= kParallelMinPixels;
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) map.at(x, y) = code_at(img, x, y);
  }
  return map;
}

namespace serial {

LbpMap lbp_map(const GrayImage& img) {
  LbpMap map(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) map.at(x, y) = code_at(img, x, y);
  }
  return map;
}

}  // namespace serial

void FeatureConfig::validate() const {
  if (face_w < 1 || face_h < 1) throw DataError("face size must be positive");
  if (levels.empty()) throw DataError("feature config needs at least one block level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const std::string where = "level " + std::to_string(i) + ": ";
    if (l.block_h < 1 || l.block_h > face_h) {
      throw DataError(where + "block height " + std::to_string(l.block_h) + " not in [1, " +
                      std::to_string(face_h) + "]");
    }
    if (l.block_w < 1 || l.block_w > face_w) {
      throw DataError(where + "block width " + std::to_string(l.block_w) + " not in [1, " +
                      std::to_string(face_w) + "]");
    }
    if (l.bins < 1 || l.bins > 256) {
      throw DataError(where + "bins " + std::to_string(l.bins) + " not in [1, 256]");
    }
  }
}

std::string FeatureConfig::id() const {
  std::string s = std::to_string(face_w) + "x" + std::to_string(face_h) + ":";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(levels[i].block_h) + "x" + std::to_string(levels[i].block_w) + "x" +
         std::to_string(levels[i].bins);
  }
  return s;
}

std::vector<Rect> block_partition(int w, int h, const BlockSpec& spec) {
  if (spec.block_h < 1 || spec.block_w < 1 || spec.block_h > h || spec.block_w > w) {
    throw DataError("block " + std::to_string(spec.block_h) + "x" + std::to_string(spec.block_w) +
                    " does not fit a " + std::to_string(w) + "x" + std::to_string(h) + " image");
  }
  const int rows = h / spec.block_h;
  const int cols = w / spec.block_w;
  std::vector<Rect> blocks;
  blocks.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    const int y = r * spec.block_h;
    const int bh = (r == rows - 1) ? h - y : spec.block_h;
    for (int c = 0; c < cols; ++c) {
      const int x = c * spec.block_w;
      const int bw = (c == cols - 1) ? w - x : spec.block_w;
      blocks.push_back({x, y, bw, bh});
    }
  }
  return blocks;
}

namespace {

void accumulate_histogram(const LbpMap& map, const Rect& r, int bins, double* out) {
  std::array<long long, 256> counts{};
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) ++counts[map.at(x, y)];
  }
  std::fill(out, out + bins, 0.0);
  for (int v = 0; v < 256; ++v) out[v * bins / 256] += static_cast<double>(counts[v]);
  const double area = static_cast<double>(r.area());
  for (int b = 0; b < bins; ++b) out[b] /= area;
}

}  // namespace

std::vector<double> block_histogram(const LbpMap& map, const Rect& r, int bins) {
  if (bins < 1 || bins > 256) throw DataError("bins must be in [1, 256]");
  if (r.w <= 0 || r.h <= 0) throw DataError("histogram block has zero area");
  if (r.x < 0 || r.y < 0 || r.x + r.w > map.width() || r.y + r.h > map.height()) {
    throw DataError("histogram block outside LBP map");
  }
  std::vector<double> hist(bins);
  accumulate_histogram(map, r, bins, hist.data());
  return hist;
}

std::size_t feature_dim(const FeatureConfig& cfg) {
  std::size_t d = 0;
  for (const auto& l : cfg.levels) {
    d += static_cast<std::size_t>(cfg.face_h / l.block_h) * (cfg.face_w / l.block_w) * l.bins;
  }
  return d;
}

FeatureVector extract_features(const GrayImage& face, const FeatureConfig& cfg) {
  cfg.validate();
  if (face.width() != cfg.face_w || face.height() != cfg.face_h) {
    throw DataError("face is " + std::to_string(face.width()) + "x" +
                    std::to_string(face.height()) + " but feature config expects " +
                    std::to_string(cfg.face_w) + "x" + std::to_string(cfg.face_h));
  }
  const LbpMap map = serial::lbp_map(face);
  FeatureVector fv{std::vector<double>(feature_dim(cfg)), cfg.id()};
  double* out = fv.values.data();
  for (const auto& level : cfg.levels) {
    for (const Rect& block : block_partition(cfg.face_w, cfg.face_h, level)) {
      accumulate_histogram(map, block, level.bins, out);
      out += level.bins;
    }
  }
  return fv;
}

std::vector<FeatureVector> extract_features_batch(std::span<const GrayImage> faces,
                                                  const FeatureConfig& cfg) {
  cfg.validate();
  std::vector<FeatureVector> out(faces.size());
  const auto n = static_cast<long long>(faces.size());
  // Exceptions must not escape the parallel region.
  std::vector<std::string> errors(faces.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < n; ++i) {
    try {
      out[i] = extract_features(faces[i], cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw DataError("image " + std::to_string(i) + ": " + errors[i]);
  }
  return out;
}

namespace serial {

std::vector<FeatureVector> extract_features_batch(std::span<const GrayImage> faces,
                                                  const FeatureConfig& cfg) {
  std::vector<FeatureVector> out;
  out.reserve(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    try {
      out.push_back(extract_features(faces[i], cfg));
    } catch (const std::exception& e) {
      throw DataError("image " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace serial

}  // namespace exprlbp
