#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace exprlbp {

/// Dense row-major matrix of doubles; just enough for the small symmetric
/// problems PCA training produces.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  [[nodiscard]] std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct JacobiOptions {
  double tolerance = 1e-12;  // off-diagonal norm relative to the Frobenius norm
  int max_sweeps = 100;
};

/// Eigenpairs sorted by descending eigenvalue; column i of `vectors` belongs
/// to values[i].
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Only the upper triangle is
/// trusted to be symmetric with the lower one; the input is not checked.
/// Throws DataError if convergence is not reached within max_sweeps.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, const JacobiOptions& opts = {});

}  // namespace exprlbp
