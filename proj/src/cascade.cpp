#include "exprlbp/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "exprlbp/error.hpp"
#include "exprlbp/pgm.hpp"

namespace exprlbp {

using nlohmann::json;

namespace {

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw DataError("cascade: " + path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError("cascade: " + path + ": missing \"" + key + "\"");
  return *it;
}

int get_int(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_number_integer()) {
    throw DataError("cascade: " + path + "." + key + ": expected an integer");
  }
  return v.get<int>();
}

double get_real(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_number()) throw DataError("cascade: " + path + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw DataError("cascade: " + path + "." + key + ": not finite");
  return d;
}

const json& get_array(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_array()) throw DataError("cascade: " + path + "." + key + ": expected an array");
  return v;
}

}  // namespace

void HaarCascade::validate() const {
  if (base_w < 4 || base_h < 4) {
    throw DataError("cascade: base window " + dims(base_w, base_h) + " smaller than 4x4");
  }
  if (stages.empty()) throw DataError("cascade: stages: at least one stage required");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const std::string sp = "stages[" + std::to_string(s) + "]";
    if (!std::isfinite(stages[s].stage_threshold)) {
      throw DataError("cascade: " + sp + ".threshold: not finite");
    }
    if (stages[s].weak.empty()) throw DataError("cascade: " + sp + ".weak: empty");
    for (std::size_t w = 0; w < stages[s].weak.size(); ++w) {
      const auto& wc = stages[s].weak[w];
      const std::string wp = sp + ".weak[" + std::to_string(w) + "]";
      if (!std::isfinite(wc.threshold) || !std::isfinite(wc.left_val) ||
          !std::isfinite(wc.right_val)) {
        throw DataError("cascade: " + wp + ": threshold and leaf values must be finite");
      }
      const auto& rects = wc.feature.rects;
      if (rects.size() < 2 || rects.size() > 3) {
        throw DataError("cascade: " + wp + ".rects: need 2 or 3 rects, got " +
                        std::to_string(rects.size()));
      }
      for (std::size_t r = 0; r < rects.size(); ++r) {
        const Rect& rc = rects[r].rect;
        const std::string rp = wp + ".rects[" + std::to_string(r) + "]";
        if (rc.x < 0 || rc.y < 0 || rc.w < 1 || rc.h < 1 || rc.x + rc.w > base_w ||
            rc.y + rc.h > base_h) {
          throw DataError("cascade: " + rp + ": rect exceeds " + dims(base_w, base_h) +
                          " base window");
        }
        if (!std::isfinite(rects[r].weight)) throw DataError("cascade: " + rp + ".weight: not finite");
      }
    }
  }
}

HaarCascade load_cascade(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("cascade: invalid JSON: ") + e.what());
  }
  const std::string root = "$";
  const json& format = member(doc, "format", root);
  if (!format.is_string() || format.get<std::string>() != HaarCascade::kFormat) {
    throw DataError("cascade: format: expected \"" + std::string(HaarCascade::kFormat) + "\"");
  }
  HaarCascade c;
  c.base_w = get_int(doc, "base_w", root);
  c.base_h = get_int(doc, "base_h", root);
  const json& stages = get_array(doc, "stages", root);
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const std::string sp = "stages[" + std::to_string(s) + "]";
    Stage stage;
    stage.stage_threshold = get_real(stages[s], "threshold", sp);
    const json& weak = get_array(stages[s], "weak", sp);
    for (std::size_t w = 0; w < weak.size(); ++w) {
      const std::string wp = sp + ".weak[" + std::to_string(w) + "]";
      WeakClassifier wc;
      wc.threshold = get_real(weak[w], "threshold", wp);
      wc.left_val = get_real(weak[w], "left", wp);
      wc.right_val = get_real(weak[w], "right", wp);
      const json& rects = get_array(weak[w], "rects", wp);
      for (std::size_t r = 0; r < rects.size(); ++r) {
        const std::string rp = wp + ".rects[" + std::to_string(r) + "]";
        wc.feature.rects.push_back({{get_int(rects[r], "x", rp), get_int(rects[r], "y", rp),
                                     get_int(rects[r], "w", rp), get_int(rects[r], "h", rp)},
                                    get_real(rects[r], "weight", rp)});
      }
      stage.weak.push_back(std::move(wc));
    }
    c.stages.push_back(std::move(stage));
  }
  c.validate();
  return c;
}

std::string cascade_to_json(const HaarCascade& cascade) {
  json doc;
  doc["format"] = HaarCascade::kFormat;
  doc["base_w"] = cascade.base_w;
  doc["base_h"] = cascade.base_h;
  doc["stages"] = json::array();
  for (const auto& stage : cascade.stages) {
    json js;
    js["threshold"] = stage.stage_threshold;
    js["weak"] = json::array();
    for (const auto& wc : stage.weak) {
      json jw;
      jw["threshold"] = wc.threshold;
      jw["left"] = wc.left_val;
      jw["right"] = wc.right_val;
      jw["rects"] = json::array();
      for (const auto& r : wc.feature.rects) {
        jw["rects"].push_back(
            {{"x", r.rect.x}, {"y", r.rect.y}, {"w", r.rect.w}, {"h", r.rect.h}, {"weight", r.weight}});
      }
      js["weak"].push_back(std::move(jw));
    }
    doc["stages"].push_back(std::move(js));
  }
  return doc.dump(2) + "\n";
}

HaarCascade read_cascade_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return load_cascade(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_cascade_file(const std::filesystem::path& path, const HaarCascade& cascade) {
  const std::string text = cascade_to_json(cascade);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ScaledCascade::ScaledCascade(const HaarCascade& cascade, int window_w, int window_h)
    : window_w_(window_w), window_h_(window_h) {
  if (window_w < cascade.base_w || window_h < cascade.base_h) {
    throw DataError("window " + dims(window_w, window_h) + " smaller than base window " +
                    dims(cascade.base_w, cascade.base_h));
  }
  const double s = static_cast<double>(window_w) / cascade.base_w;
  auto scaled = [&](int v) { return static_cast<int>(std::lround(v * s)); };
  stages_.reserve(cascade.stages.size());
  for (const auto& stage : cascade.stages) {
    ScaledStage ss{{}, stage.stage_threshold};
    for (const auto& wc : stage.weak) {
      ScaledWeak sw{{}, wc.threshold, wc.left_val, wc.right_val};
      for (const auto& wr : wc.feature.rects) {
        Rect r{scaled(wr.rect.x), scaled(wr.rect.y), scaled(wr.rect.w), scaled(wr.rect.h)};
        r.x = std::min(r.x, window_w - 1);
        r.y = std::min(r.y, window_h - 1);
        r.w = std::clamp(r.w, 1, window_w - r.x);
        r.h = std::clamp(r.h, 1, window_h - r.y);
        const double ideal = static_cast<double>(wr.rect.area()) * s * s;
        sw.rects.push_back({r, wr.weight * ideal / static_cast<double>(r.area())});
      }
      ss.weak.push_back(std::move(sw));
    }
    stages_.push_back(std::move(ss));
  }
}

bool ScaledCascade::accepts(const IntegralImage& ii, int x, int y) const {
  const Rect window{x, y, window_w_, window_h_};
  const double area = static_cast<double>(window.area());
  const double mean = static_cast<double>(ii.rect_sum(window)) / area;
  const double var = static_cast<double>(ii.rect_sq_sum(window)) / area - mean * mean;
  const double sigma = std::max(1.0, std::sqrt(std::max(0.0, var)));
  const double norm = area * sigma;

  for (const auto& stage : stages_) {
    double total = 0.0;
    for (const auto& wc : stage.weak) {
      double value = 0.0;
      for (const auto& wr : wc.rects) {
        const Rect r{x + wr.rect.x, y + wr.rect.y, wr.rect.w, wr.rect.h};
        value += wr.weight * static_cast<double>(ii.rect_sum(r));
      }
      value /= norm;
      total += value < wc.threshold ? wc.left_val : wc.right_val;
    }
    if (total < stage.threshold) return false;
  }
  return true;
}

bool eval_window(const HaarCascade& cascade, const IntegralImage& ii, const Rect& window) {
  if (window.x < 0 || window.y < 0 || window.x + window.w > ii.width() ||
      window.y + window.h > ii.height()) {
    throw DataError("window outside image");
  }
  return ScaledCascade(cascade, window.w, window.h).accepts(ii, window.x, window.y);
}

}  // namespace exprlbp
