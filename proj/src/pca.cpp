#include "exprlbp/pca.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "exprlbp/error.hpp"
#include "exprlbp/jacobi.hpp"

namespace exprlbp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void require_dim(const ClassModel& cm, std::size_t n, const char* what) {
  if (n != cm.dim()) {
    throw DataError(std::string(what) + " has length " + std::to_string(n) + ", class " +
                    std::string(to_string(cm.label)) + " expects " + std::to_string(cm.dim()));
  }
}

void fix_sign(std::vector<double>& u) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (std::abs(u[i]) > std::abs(u[arg])) arg = i;
  }
  if (u[arg] < 0.0) {
    for (double& x : u) x = -x;
  }
}

}  // namespace

ClassModel train_class(Expression label, std::span<const std::vector<double>> samples, int k,
                       const RankTolerance& tol) {
  if (samples.empty()) {
    throw DataError("class " + std::string(to_string(label)) + " has no training samples");
  }
  if (k < 1) throw DataError("number of eigenvectors k must be >= 1");
  const std::size_t d = samples.front().size();
  const std::size_t p = samples.size();
  for (std::size_t i = 0; i < p; ++i) {
    if (samples[i].size() != d) {
      throw DataError("class " + std::string(to_string(label)) + ": sample " + std::to_string(i) +
                      " has length " + std::to_string(samples[i].size()) + ", expected " +
                      std::to_string(d));
    }
  }

  ClassModel cm;
  cm.label = label;
  cm.k_requested = k;
  cm.mean.assign(d, 0.0);
  for (const auto& s : samples) {
    for (std::size_t r = 0; r < d; ++r) cm.mean[r] += s[r];
  }
  for (double& m : cm.mean) m /= static_cast<double>(p);

  // Columns of A: phi_i = gamma_i - mean.
  std::vector<std::vector<double>> phi(p, std::vector<double>(d));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t r = 0; r < d; ++r) phi[i][r] = samples[i][r] - cm.mean[r];
  }

  Matrix gram(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      gram(i, j) = gram(j, i) = dot(phi[i], phi[j]);
    }
  }
  const SymmetricEigen eig = jacobi_eigen(gram);
  const double mu_max = eig.values.empty() ? 0.0 : eig.values.front();
  if (mu_max <= tol.absolute) return cm;

  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), p);
  for (std::size_t c = 0; c < keep; ++c) {
    const double mu = eig.values[c];
    if (mu <= tol.relative * mu_max) break;
    std::vector<double> u(d, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
      const double vi = eig.vectors(i, c);
      for (std::size_t r = 0; r < d; ++r) u[r] += vi * phi[i][r];
    }
    // One Gram-Schmidt pass against the accepted directions removes the
    // rounding drift the lift amplifies for small mu.
    for (const auto& prev : cm.basis) {
      const double proj = dot(u, prev);
      for (std::size_t r = 0; r < d; ++r) u[r] -= proj * prev[r];
    }
    const double len = norm(u);
    if (len <= 0.0) break;
    for (double& x : u) x /= len;
    fix_sign(u);
    cm.basis.push_back(std::move(u));
    cm.eigenvalues.push_back(mu / static_cast<double>(p));
  }
  return cm;
}

void ExpressionModel::validate() const {
  feature_config.validate();
  if (classes.size() != kNumExpressions) {
    throw DataError("model must hold exactly " + std::to_string(kNumExpressions) +
                    " classes, has " + std::to_string(classes.size()));
  }
  const std::size_t d = feature_dim(feature_config);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& cm = classes[i];
    if (cm.label != kExpressions[i]) {
      throw DataError("class " + std::to_string(i) + " is " + std::string(to_string(cm.label)) +
                      ", expected " + std::string(kExpressionNames[i]));
    }
    if (cm.dim() != d) {
      throw DataError("class " + std::string(to_string(cm.label)) + " has dimension " +
                      std::to_string(cm.dim()) + ", feature config implies " + std::to_string(d));
    }
    if (cm.eigenvalues.size() != cm.basis.size()) {
      throw DataError("class " + std::string(to_string(cm.label)) +
                      ": eigenvalue and basis counts differ");
    }
    for (const auto& u : cm.basis) {
      if (u.size() != d) {
        throw DataError("class " + std::string(to_string(cm.label)) + ": basis vector length " +
                        std::to_string(u.size()) + " != " + std::to_string(d));
      }
    }
  }
}

namespace {

void check_samples(const SamplesByClass& samples, const FeatureConfig& cfg) {
  cfg.validate();
  const std::size_t d = feature_dim(cfg);
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    if (samples[c].empty()) {
      throw DataError("no training samples for class " + std::string(kExpressionNames[c]));
    }
    for (const auto& s : samples[c]) {
      if (s.size() != d) {
        throw DataError("class " + std::string(kExpressionNames[c]) + ": sample length " +
                        std::to_string(s.size()) + " != feature dimension " + std::to_string(d));
      }
    }
  }
}

}  // namespace

ExpressionModel train_model(const SamplesByClass& samples, int k, const FeatureConfig& cfg) {
  check_samples(samples, cfg);
  ExpressionModel model;
  model.feature_config = cfg;
  model.classes.resize(kNumExpressions);
  std::array<std::optional<std::string>, kNumExpressions> errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < static_cast<int>(kNumExpressions); ++c) {
    try {
      model.classes[c] = train_class(kExpressions[c], samples[c], k);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (e) throw DataError(*e);
  }
  return model;
}

namespace serial {

ExpressionModel train_model(const SamplesByClass& samples, int k, const FeatureConfig& cfg) {
  check_samples(samples, cfg);
  ExpressionModel model;
  model.feature_config = cfg;
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    model.classes.push_back(train_class(kExpressions[c], samples[c], k));
  }
  return model;
}

}  // namespace serial

std::vector<double> project(const ClassModel& cm, std::span<const double> gamma) {
  require_dim(cm, gamma.size(), "feature vector");
  std::vector<double> phi(gamma.begin(), gamma.end());
  for (std::size_t r = 0; r < phi.size(); ++r) phi[r] -= cm.mean[r];
  std::vector<double> w(cm.rank());
  for (std::size_t i = 0; i < cm.rank(); ++i) w[i] = dot(cm.basis[i], phi);
  return w;
}

std::vector<double> reconstruct(const ClassModel& cm, std::span<const double> weights) {
  if (weights.size() != cm.rank()) {
    throw DataError("weight vector has length " + std::to_string(weights.size()) + ", class " +
                    std::string(to_string(cm.label)) + " has rank " + std::to_string(cm.rank()));
  }
  std::vector<double> out(cm.dim(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += weights[i] * cm.basis[i][r];
  }
  return out;
}

double reconstruction_error(const ClassModel& cm, std::span<const double> gamma) {
  const std::vector<double> w = project(cm, gamma);
  const std::vector<double> phi_hat = reconstruct(cm, w);
  double s = 0.0;
  for (std::size_t r = 0; r < phi_hat.size(); ++r) {
    const double diff = (gamma[r] - cm.mean[r]) - phi_hat[r];
    s += diff * diff;
  }
  return std::sqrt(s);
}

ClassScores classify(const ExpressionModel& model, std::span<const double> gamma) {
  if (model.classes.size() != kNumExpressions) {
    throw DataError("model must hold exactly six classes");
  }
  ClassScores scores;
  std::size_t best = 0;
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    scores.errors[c] = reconstruction_error(model.classes[c], gamma);
    if (scores.errors[c] < scores.errors[best]) best = c;
  }
  scores.predicted = kExpressions[best];
  return scores;
}

}  // namespace exprlbp
