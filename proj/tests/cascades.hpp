#pragma once

// Small handcrafted cascades and scenes shared by the detection, CLI and
// acceptance tests.

#include <cmath>
#include <random>

#include "exprlbp/cascade.hpp"
#include "exprlbp/image.hpp"

namespace fixtures {

using exprlbp::GrayImage;
using exprlbp::HaarCascade;
using exprlbp::Rect;

inline exprlbp::WeakClassifier halves_stump(int base_w, int base_h, double threshold, double left,
                                            double right) {
  const int half = base_w / 2;
  return {{{{{0, 0, half, base_h}, 1.0}, {{half, 0, base_w - half, base_h}, -1.0}}},
          threshold,
          left,
          right};
}

/// A single stump that always takes its right leaf (1.0) and a stage
/// threshold below it.
inline HaarCascade always_pass(int base_w = 24, int base_h = 24) {
  return {base_w, base_h, {{{halves_stump(base_w, base_h, -1e30, 0.0, 1.0)}, 0.5}}};
}

/// Same stump, but the stage needs more than any leaf can give.
inline HaarCascade always_fail(int base_w = 24, int base_h = 24) {
  return {base_w, base_h, {{{halves_stump(base_w, base_h, -1e30, 0.0, 1.0)}, 2.0}}};
}

/// Finds a bright square on a dark background: the 16x16 base window must
/// hold a bright centered 12x12 core (center-surround feature), with its left
/// and right halves balanced.
inline HaarCascade bright_square() {
  HaarCascade c;
  c.base_w = 16;
  c.base_h = 16;
  const exprlbp::WeakClassifier core{
      {{{{2, 2, 12, 12}, 1.0}, {{0, 0, 16, 16}, -144.0 / 256.0}}}, 0.3, 0.0, 1.0};
  const exprlbp::WeakClassifier too_left = halves_stump(16, 16, -0.1, 0.0, 1.0);
  const exprlbp::WeakClassifier too_right = halves_stump(16, 16, 0.1, 1.0, 0.0);
  c.stages.push_back({{core}, 0.5});
  c.stages.push_back({{too_left, too_right}, 1.5});
  return c;
}

/// Dark scene holding one bright square of side `side` at (x, y). The
/// cascade above then frames it with a window 16/12 times larger.
inline GrayImage square_scene(int w, int h, int x, int y, int side, std::mt19937* rng = nullptr) {
  GrayImage img(w, h, 40);
  for (int j = y; j < y + side; ++j)
    for (int i = x; i < x + side; ++i) img.at(i, j) = 200;
  if (rng) {
    std::uniform_int_distribution<int> jitter(-6, 6);
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(p + jitter(*rng));
  }
  return img;
}

/// The window the bright_square cascade should report for a square.
inline Rect expected_frame(int x, int y, int side) {
  const int margin = static_cast<int>(std::lround(side * 2.0 / 12.0));
  return {x - margin, y - margin, side + 2 * margin, side + 2 * margin};
}

}  // namespace fixtures
