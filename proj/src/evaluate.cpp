#include "exprlbp/evaluate.hpp"

#include <chrono>
#include <cstdio>
#include <vector>

#include "exprlbp/error.hpp"
#include "exprlbp/pgm.hpp"

namespace exprlbp {

ConfusionMatrix ConfusionMatrix::from_counts(
    const std::array<std::array<long long, kNumExpressions>, kNumExpressions>& counts) {
  ConfusionMatrix cm;
  cm.counts = counts;
  for (std::size_t r = 0; r < kNumExpressions; ++r) {
    long long row = 0;
    for (long long c : counts[r]) row += c;
    cm.empty_row[r] = row == 0;
    for (std::size_t c = 0; c < kNumExpressions; ++c) {
      cm.row_normalized[r][c] = row ? static_cast<double>(counts[r][c]) / static_cast<double>(row) : 0.0;
    }
  }
  return cm;
}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto& row : counts) {
    for (long long c : row) t += c;
  }
  return t;
}

PreprocessConfig preprocess_for(const FeatureConfig& cfg, const BilateralParams& bilateral) {
  return {cfg.face_w, cfg.face_h, bilateral};
}

std::optional<Rect> locate_face(const GrayImage& img, const FaceSource& source) {
  if (source.pre_cropped) return img.bounds();
  if (!source.cascade) throw DataError("face detection requested without a cascade");
  const auto dets = detect_faces(img, *source.cascade, source.detect);
  const auto best = best_detection(dets);
  if (!best) return std::nullopt;
  return best->rect;
}

FeatureVector face_features(const GrayImage& img, const Rect& face, const PreprocessConfig& pre,
                            const FeatureConfig& cfg) {
  return extract_features(preprocess_face(img, face, pre), cfg);
}

ExpressionModel train_from_faces(std::span<const LabeledImage> images, std::span<const Rect> faces,
                                 int k, const FeatureConfig& cfg, const BilateralParams& bilateral) {
  if (images.size() != faces.size()) throw DataError("one face rect per training image required");
  const PreprocessConfig pre = preprocess_for(cfg, bilateral);
  pre.validate();
  std::vector<GrayImage> prepared(images.size());
  std::vector<std::string> errors(images.size());
  const auto n = static_cast<long long>(images.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < n; ++i) {
    try {
      prepared[i] = preprocess_face(images[i].image, faces[i], pre);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw DataError("training image " + std::to_string(i) + ": " + errors[i]);
  }
  auto features = extract_features_batch(prepared, cfg);
  SamplesByClass samples;
  for (std::size_t i = 0; i < images.size(); ++i) {
    samples[index_of(images[i].label)].push_back(std::move(features[i].values));
  }
  return train_model(samples, k, cfg);
}

ExpressionModel train_from_images(std::span<const LabeledImage> images, int k,
                                  const FeatureConfig& cfg, const BilateralParams& bilateral) {
  std::vector<Rect> faces;
  faces.reserve(images.size());
  for (const auto& li : images) faces.push_back(li.image.bounds());
  return train_from_faces(images, faces, k, cfg, bilateral);
}

namespace {

struct Outcome {
  int predicted = -1;  // -1: no face
  double latency_s = 0.0;
};

void check_consistent(const ExpressionModel& model, const PreprocessConfig& pre) {
  pre.validate();
  if (pre.face_w != model.feature_config.face_w || pre.face_h != model.feature_config.face_h) {
    throw DataError("preprocess face size " + std::to_string(pre.face_w) + "x" +
                    std::to_string(pre.face_h) + " differs from the model's " +
                    std::to_string(model.feature_config.face_w) + "x" +
                    std::to_string(model.feature_config.face_h));
  }
}

Outcome classify_one(const ExpressionModel& model, const GrayImage& img,
                     const PreprocessConfig& pre, const FaceSource& source) {
  const auto face = locate_face(img, source);
  if (!face) return {};
  const auto start = std::chrono::steady_clock::now();
  const FeatureVector fv = face_features(img, *face, pre, model.feature_config);
  const ClassScores scores = classify(model, fv.values);
  const auto stop = std::chrono::steady_clock::now();
  return {static_cast<int>(index_of(scores.predicted)),
          std::chrono::duration<double>(stop - start).count()};
}

EvalReport summarize(std::span<const LabeledImage> images, const std::vector<Outcome>& outcomes) {
  std::array<std::array<long long, kNumExpressions>, kNumExpressions> counts{};
  EvalReport rep;
  double latency = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].predicted < 0) {
      ++rep.no_face;
      continue;
    }
    ++counts[index_of(images[i].label)][outcomes[i].predicted];
    latency += outcomes[i].latency_s;
    ++rep.evaluated;
  }
  rep.confusion = ConfusionMatrix::from_counts(counts);
  if (rep.evaluated == 0) return rep;
  long long correct = 0;
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    correct += counts[c][c];
    rep.per_class_accuracy[c] = rep.confusion.row_normalized[c][c];
  }
  rep.overall_accuracy = static_cast<double>(correct) / static_cast<double>(rep.evaluated);
  rep.mean_latency_s = latency / static_cast<double>(rep.evaluated);
  return rep;
}

}  // namespace

EvalReport evaluate_images(const ExpressionModel& model, std::span<const LabeledImage> images,
                           const PreprocessConfig& pre, const FaceSource& source) {
  check_consistent(model, pre);
  std::vector<Outcome> outcomes(images.size());
  std::vector<std::string> errors(images.size());
  const auto n = static_cast<long long>(images.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < n; ++i) {
    try {
      outcomes[i] = classify_one(model, images[i].image, pre, source);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw DataError("test image " + std::to_string(i) + ": " + errors[i]);
  }
  return summarize(images, outcomes);
}

namespace serial {

EvalReport evaluate_images(const ExpressionModel& model, std::span<const LabeledImage> images,
                           const PreprocessConfig& pre, const FaceSource& source) {
  check_consistent(model, pre);
  std::vector<Outcome> outcomes;
  outcomes.reserve(images.size());
  for (const auto& li : images) outcomes.push_back(classify_one(model, li.image, pre, source));
  return summarize(images, outcomes);
}

}  // namespace serial

EvalReport evaluate(const ExpressionModel& model, const DatasetManifest& test,
                    const PreprocessConfig& pre, const FaceSource& source) {
  std::vector<LabeledImage> images;
  std::size_t unreadable = 0;
  for (const auto& e : test.entries) {
    try {
      images.push_back({read_pgm_file(e.path), e.label});
    } catch (const Error&) {
      ++unreadable;
    }
  }
  EvalReport rep = evaluate_images(model, images, pre, source);
  rep.unreadable = unreadable;
  if (rep.evaluated == 0) {
    throw DataError("no usable test images (" + std::to_string(unreadable) + " unreadable, " +
                    std::to_string(rep.no_face) + " without a face)");
  }
  return rep;
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "true\\predicted";
  for (auto name : kExpressionNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  char buf[32];
  for (std::size_t r = 0; r < kNumExpressions; ++r) {
    out += kExpressionNames[r];
    for (std::size_t c = 0; c < kNumExpressions; ++c) {
      std::snprintf(buf, sizeof buf, ",%.6f", report.confusion.row_normalized[r][c]);
      out += buf;
    }
    out += '\n';
  }
  std::snprintf(buf, sizeof buf, "%.6f", report.overall_accuracy);
  out += "accuracy," + std::string(buf) + "\n";
  std::snprintf(buf, sizeof buf, "%.9f", report.mean_latency_s);
  out += "mean_latency_s," + std::string(buf) + "\n";
  return out;
}

}  // namespace exprlbp
