#pragma once

#include <optional>
#include <span>
#include <vector>

#include "exprlbp/cascade.hpp"
#include "exprlbp/image.hpp"

namespace exprlbp {

struct DetectParams {
  double scale_factor = 1.2;
  int step = 2;           // at base scale; scaled with the window
  int min_neighbors = 3;
  int min_size = 0;       // minimum window width; 0 means the base width

  void validate() const;
};

struct Detection {
  Rect rect;
  int neighbors = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

double iou(const Rect& a, const Rect& b);

/// Clusters rects transitively over IoU >= 0.5, drops clusters smaller than
/// `min_neighbors` and emits each cluster's rounded mean rect, ordered by
/// (y, x, w, h).
std::vector<Detection> group_detections(std::span<const Rect> raw, int min_neighbors);

/// Every accepted window over the scale pyramid scale_factor^t, ordered by
/// (y, x, size). Windows are evaluated in parallel.
std::vector<Rect> raw_detections(const GrayImage& img, const HaarCascade& cascade,
                                 const DetectParams& p);

/// raw_detections followed by group_detections.
std::vector<Detection> detect_faces(const GrayImage& img, const HaarCascade& cascade,
                                    const DetectParams& p);

/// The detection with most neighbors, then the largest; nullopt if none.
std::optional<Detection> best_detection(std::span<const Detection> dets);

namespace serial {

std::vector<Rect> raw_detections(const GrayImage& img, const HaarCascade& cascade,
                                 const DetectParams& p);
std::vector<Detection> detect_faces(const GrayImage& img, const HaarCascade& cascade,
                                    const DetectParams& p);

}  // namespace serial

}  // namespace exprlbp
