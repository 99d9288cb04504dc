#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "exprlbp/expression.hpp"
#include "exprlbp/lbp.hpp"

namespace exprlbp {

/// Rank tolerances for discarding Gram eigenpairs before lifting.
struct RankTolerance {
  double relative = 1e-8;   // drop mu_i <= relative * mu_max
  double absolute = 1e-12;  // mu_max at or below this means rank 0
};

/// One expression's eigenspace: class mean and an orthonormal basis of the
/// top principal directions of its centered training features.
struct ClassModel {
  Expression label = Expression::Anger;
  std::vector<double> mean;
  std::vector<double> eigenvalues;          // covariance eigenvalues, descending
  std::vector<std::vector<double>> basis;   // unit vectors, same order
  int k_requested = 0;

  [[nodiscard]] std::size_t dim() const { return mean.size(); }
  [[nodiscard]] std::size_t rank() const { return basis.size(); }
};

struct ExpressionModel {
  static constexpr std::string_view kFormatVersion = "1";

  std::vector<ClassModel> classes;  // exactly six, canonical order
  FeatureConfig feature_config;
  std::string format_version{kFormatVersion};

  /// Checks class count/order and that every class has D = feature_dim.
  void validate() const;
};

struct ClassScores {
  std::array<double, kNumExpressions> errors{};
  Expression predicted = Expression::Anger;
};

/// Fits a class subspace through the P x P Gram matrix of the centered
/// samples. Eigenvectors v of A^T A are lifted to u = A v / |A v|; the
/// stored eigenvalue is mu / P so it matches (1/P) A A^T. Keeps at most `k`
/// directions above the rank tolerance. Each u has its largest-magnitude
/// component made positive.
ClassModel train_class(Expression label, std::span<const std::vector<double>> samples, int k,
                       const RankTolerance& tol = {});

using SamplesByClass = std::array<std::vector<std::vector<double>>, kNumExpressions>;

/// train_class for each expression; classes are fitted concurrently.
ExpressionModel train_model(const SamplesByClass& samples, int k, const FeatureConfig& cfg);

/// W = U^T (gamma - mean).
std::vector<double> project(const ClassModel& cm, std::span<const double> gamma);

/// sum_i w_i u_i.
std::vector<double> reconstruct(const ClassModel& cm, std::span<const double> weights);

/// |phi - U U^T phi| with phi = gamma - mean.
double reconstruction_error(const ClassModel& cm, std::span<const double> gamma);

/// Reconstruction error against every class; the smallest wins, ties go to
/// the lower canonical index.
ClassScores classify(const ExpressionModel& model, std::span<const double> gamma);

namespace serial {

ExpressionModel train_model(const SamplesByClass& samples, int k, const FeatureConfig& cfg);

}  // namespace serial

}  // namespace exprlbp
