#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "exprlbp/image.hpp"
#include "exprlbp/integral.hpp"

namespace exprlbp {

struct WeightedRect {
  Rect rect;  // base-window coordinates
  double weight = 0.0;
};

/// Signed sum of 2-3 weighted rectangles.
struct HaarFeature {
  std::vector<WeightedRect> rects;
};

/// Decision stump: left_val when the feature value is below threshold.
struct WeakClassifier {
  HaarFeature feature;
  double threshold = 0.0;
  double left_val = 0.0;
  double right_val = 0.0;
};

struct Stage {
  std::vector<WeakClassifier> weak;
  double stage_threshold = 0.0;
};

struct HaarCascade {
  static constexpr std::string_view kFormat = "exprlbp-cascade-1";

  int base_w = 0;
  int base_h = 0;
  std::vector<Stage> stages;

  /// Throws DataError naming the offending element, e.g.
  /// "stages[0].weak[2].rects[1]: rect exceeds 24x24 base window".
  void validate() const;
};

HaarCascade load_cascade(std::string_view json_text);
std::string cascade_to_json(const HaarCascade& cascade);

HaarCascade read_cascade_file(const std::filesystem::path& path);
void write_cascade_file(const std::filesystem::path& path, const HaarCascade& cascade);

/// A cascade with every rectangle pre-scaled for one window size. Rect
/// coordinates are rounded to the scaled grid and each weight is multiplied
/// by (scaled ideal area) / (rounded area), so rounding does not change a
/// feature's magnitude and zero-sum features stay zero-sum.
class ScaledCascade {
 public:
  ScaledCascade(const HaarCascade& cascade, int window_w, int window_h);

  [[nodiscard]] int window_w() const { return window_w_; }
  [[nodiscard]] int window_h() const { return window_h_; }

  /// Evaluates the window whose top-left corner is (x, y). Bounds are the
  /// caller's responsibility.
  [[nodiscard]] bool accepts(const IntegralImage& ii, int x, int y) const;

 private:
  struct ScaledWeak {
    std::vector<WeightedRect> rects;
    double threshold;
    double left_val;
    double right_val;
  };
  struct ScaledStage {
    std::vector<ScaledWeak> weak;
    double threshold;
  };

  int window_w_;
  int window_h_;
  std::vector<ScaledStage> stages_;
};

/// Variance-normalized cascade evaluation of one window. Scale is
/// window.w / base_w; the window's pixel standard deviation is clamped below
/// at 1. Throws DataError when the window leaves the image or is smaller
/// than the base window.
bool eval_window(const HaarCascade& cascade, const IntegralImage& ii, const Rect& window);

}  // namespace exprlbp
