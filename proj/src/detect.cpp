#include "exprlbp/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "exprlbp/error.hpp"
#include "exprlbp/integral.hpp"

namespace exprlbp {

void DetectParams::validate() const {
  if (!(scale_factor > 1.0) || !std::isfinite(scale_factor)) {
    throw DataError("scale factor must be > 1");
  }
  if (step < 1) throw DataError("scan step must be >= 1");
  if (min_neighbors < 0) throw DataError("min_neighbors must be >= 0");
  if (min_size < 0) throw DataError("min_size must be >= 0");
}

double iou(const Rect& a, const Rect& b) {
  const int ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const int iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = static_cast<double>(ix) * iy;
  const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

bool rect_order(const Rect& a, const Rect& b) {
  return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

struct Candidate {
  const ScaledCascade* cascade;
  int x;
  int y;
};

struct Pyramid {
  std::vector<ScaledCascade> scales;
  std::vector<Candidate> candidates;
};

Pyramid build_pyramid(const GrayImage& img, const HaarCascade& cascade, const DetectParams& p) {
  p.validate();
  cascade.validate();
  Pyramid pyr;
  const int min_w = std::max(cascade.base_w, p.min_size);
  std::vector<std::pair<int, int>> sizes;  // (window_w, step)
  int prev_w = -1;
  for (int t = 0;; ++t) {
    const double s = std::pow(p.scale_factor, t);
    const int ww = static_cast<int>(std::lround(cascade.base_w * s));
    const int wh = static_cast<int>(std::lround(cascade.base_h * s));
    if (ww > img.width() || wh > img.height()) break;
    if (ww == prev_w || ww < min_w) continue;
    prev_w = ww;
    pyr.scales.emplace_back(cascade, ww, wh);
    sizes.emplace_back(ww, std::max(1, static_cast<int>(std::lround(p.step * s))));
  }
  // Scales first so candidate pointers stay valid.
  for (std::size_t k = 0; k < pyr.scales.size(); ++k) {
    const ScaledCascade& sc = pyr.scales[k];
    const int step = sizes[k].second;
    for (int y = 0; y + sc.window_h() <= img.height(); y += step) {
      for (int x = 0; x + sc.window_w() <= img.width(); x += step) {
        pyr.candidates.push_back({&sc, x, y});
      }
    }
  }
  return pyr;
}

std::vector<Rect> collect(const Pyramid& pyr, const std::vector<char>& accepted) {
  std::vector<Rect> hits;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (!accepted[i]) continue;
    const Candidate& c = pyr.candidates[i];
    hits.push_back({c.x, c.y, c.cascade->window_w(), c.cascade->window_h()});
  }
  std::sort(hits.begin(), hits.end(), rect_order);
  return hits;
}

// Means of x and w are rounded separately, so a cluster hugging the right or
// bottom edge can overhang by one pixel.
std::vector<Detection> clamp_to(const GrayImage& img, std::vector<Detection> dets) {
  for (auto& d : dets) {
    d.rect.w = std::min(d.rect.w, img.width() - d.rect.x);
    d.rect.h = std::min(d.rect.h, img.height() - d.rect.y);
  }
  return dets;
}

}  // namespace

std::vector<Detection> group_detections(std::span<const Rect> raw, int min_neighbors) {
  const std::size_t n = raw.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (iou(raw[i], raw[j]) >= 0.5) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }
  struct Acc {
    double x = 0, y = 0, w = 0, h = 0;
    int count = 0;
  };
  std::vector<Acc> acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    Acc& a = acc[find_root(parent, i)];
    a.x += raw[i].x;
    a.y += raw[i].y;
    a.w += raw[i].w;
    a.h += raw[i].h;
    ++a.count;
  }
  std::vector<Detection> out;
  for (const Acc& a : acc) {
    if (a.count == 0 || a.count < min_neighbors) continue;
    auto mean = [&](double v) { return static_cast<int>(std::lround(v / a.count)); };
    out.push_back({{mean(a.x), mean(a.y), mean(a.w), mean(a.h)}, a.count});
  }
  std::sort(out.begin(), out.end(),
            [](const Detection& a, const Detection& b) { return rect_order(a.rect, b.rect); });
  return out;
}

std::vector<Rect> raw_detections(const GrayImage& img, const HaarCascade& cascade,
                                 const DetectParams& p) {
  const Pyramid pyr = build_pyramid(img, cascade, p);
  const IntegralImage ii(img);
  std::vector<char> accepted(pyr.candidates.size(), 0);
  const auto n = static_cast<long long>(pyr.candidates.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (long long i = 0; i < n; ++i) {
    const Candidate& c = pyr.candidates[i];
    accepted[i] = c.cascade->accepts(ii, c.x, c.y) ? 1 : 0;
  }
  return collect(pyr, accepted);
}

std::vector<Detection> detect_faces(const GrayImage& img, const HaarCascade& cascade,
                                    const DetectParams& p) {
  const auto raw = raw_detections(img, cascade, p);
  return clamp_to(img, group_detections(raw, p.min_neighbors));
}

namespace serial {

std::vector<Rect> raw_detections(const GrayImage& img, const HaarCascade& cascade,
                                 const DetectParams& p) {
  const Pyramid pyr = build_pyramid(img, cascade, p);
  const IntegralImage ii(img);
  std::vector<char> accepted(pyr.candidates.size(), 0);
  for (std::size_t i = 0; i < pyr.candidates.size(); ++i) {
    const Candidate& c = pyr.candidates[i];
    accepted[i] = c.cascade->accepts(ii, c.x, c.y) ? 1 : 0;
  }
  return collect(pyr, accepted);
}

std::vector<Detection> detect_faces(const GrayImage& img, const HaarCascade& cascade,
                                    const DetectParams& p) {
  const auto raw = serial::raw_detections(img, cascade, p);
  return clamp_to(img, group_detections(raw, p.min_neighbors));
}

}  // namespace serial

std::optional<Detection> best_detection(std::span<const Detection> dets) {
  std::optional<Detection> best;
  for (const auto& d : dets) {
    if (!best || d.neighbors > best->neighbors ||
        (d.neighbors == best->neighbors && d.rect.area() > best->rect.area())) {
      best = d;
    }
  }
  return best;
}

}  // namespace exprlbp
