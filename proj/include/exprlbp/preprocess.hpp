#pragma once

#include "exprlbp/image.hpp"

namespace exprlbp {

struct BilateralParams {
  int radius = 2;              // window is (2 * radius + 1)^2
  double sigma_spatial = 2.0;  // pixels
  double sigma_range = 25.0;   // intensity units

  void validate() const;
};

/// Target face geometry (N x M) plus the denoising filter applied after resize.
struct PreprocessConfig {
  int face_w = 40;
  int face_h = 40;
  BilateralParams bilateral;

  void validate() const;
};

/// Edge-preserving smoothing with replicated borders. Output pixel is the
/// normalized sum of w = exp(-d^2 / 2 sigma_s^2) * exp(-dI^2 / 2 sigma_r^2)
/// over the window, rounded to nearest. Rows are split across OpenMP threads
/// for images large enough to amortize the team start-up.
GrayImage bilateral_filter(const GrayImage& img, const BilateralParams& p);

/// crop -> resize_bilinear(face_w, face_h) -> bilateral_filter.
GrayImage preprocess_face(const GrayImage& img, const Rect& face, const PreprocessConfig& cfg);

namespace serial {

/// Single-threaded reference; bit-identical to exprlbp::bilateral_filter.
GrayImage bilateral_filter(const GrayImage& img, const BilateralParams& p);

}  // namespace serial

}  // namespace exprlbp
