#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "exprlbp/cascade.hpp"
#include "exprlbp/dataset.hpp"
#include "exprlbp/detect.hpp"
#include "exprlbp/pca.hpp"
#include "exprlbp/preprocess.hpp"

namespace exprlbp {

using ExpressionTable = std::array<std::array<double, kNumExpressions>, kNumExpressions>;

/// Rows are true labels, columns predictions, both in canonical order.
struct ConfusionMatrix {
  std::array<std::array<long long, kNumExpressions>, kNumExpressions> counts{};
  ExpressionTable row_normalized{};
  std::array<bool, kNumExpressions> empty_row{};

  static ConfusionMatrix from_counts(
      const std::array<std::array<long long, kNumExpressions>, kNumExpressions>& counts);
  [[nodiscard]] long long total() const;
};

struct EvalReport {
  ConfusionMatrix confusion;
  double overall_accuracy = 0.0;
  std::array<double, kNumExpressions> per_class_accuracy{};
  double mean_latency_s = 0.0;  // preprocess + extract + classify, per image
  std::size_t evaluated = 0;
  std::size_t unreadable = 0;
  std::size_t no_face = 0;
};

/// How to find the face inside an input image.
struct FaceSource {
  bool pre_cropped = true;               // whole image is the face
  const HaarCascade* cascade = nullptr;  // required when !pre_cropped
  DetectParams detect;
};

PreprocessConfig preprocess_for(const FeatureConfig& cfg, const BilateralParams& bilateral);

/// Whole image when pre-cropped, otherwise best_detection of detect_faces.
std::optional<Rect> locate_face(const GrayImage& img, const FaceSource& source);

/// preprocess_face followed by extract_features.
FeatureVector face_features(const GrayImage& img, const Rect& face, const PreprocessConfig& pre,
                            const FeatureConfig& cfg);

/// Preprocesses every face (rect per image), extracts features in parallel and
/// trains the six class subspaces.
ExpressionModel train_from_faces(std::span<const LabeledImage> images, std::span<const Rect> faces,
                                 int k, const FeatureConfig& cfg, const BilateralParams& bilateral);

/// train_from_faces with each image taken whole.
ExpressionModel train_from_images(std::span<const LabeledImage> images, int k,
                                  const FeatureConfig& cfg, const BilateralParams& bilateral);

/// Classifies every image in parallel and accumulates the confusion matrix in
/// input order. Images whose face cannot be located count as no_face.
EvalReport evaluate_images(const ExpressionModel& model, std::span<const LabeledImage> images,
                           const PreprocessConfig& pre, const FaceSource& source);

/// Reads each manifest entry (unreadable files are skipped and counted) then
/// runs evaluate_images. Throws DataError when nothing could be evaluated.
EvalReport evaluate(const ExpressionModel& model, const DatasetManifest& test,
                    const PreprocessConfig& pre, const FaceSource& source);

/// Header, six label rows with six values at 6 decimals, then accuracy and
/// mean latency rows.
std::string report_to_csv(const EvalReport& report);

namespace serial {

EvalReport evaluate_images(const ExpressionModel& model, std::span<const LabeledImage> images,
                           const PreprocessConfig& pre, const FaceSource& source);

}  // namespace serial

}  // namespace exprlbp
