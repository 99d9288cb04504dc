#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "exprlbp/error.hpp"
#include "exprlbp/pca.hpp"

namespace exprlbp {

/// Malformed model file; `line()` is 1-based (0 when not tied to a line).
class ModelFormatError : public DataError {
 public:
  ModelFormatError(std::size_t line, const std::string& message)
      : DataError(message), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Layout, one record per LF-terminated line:
//   exprlbp-model,1
//   config,<face_w>,<face_h>
//   level,<block_h>,<block_w>,<bins>        one per level
//   class,<label>,<K>,<D>                   six blocks, canonical order
//   mean,<v1>,...,<vD>
//   eig,<lambda>,<u1>,...,<uD>              K lines, descending lambda
std::string save_model_csv(const ExpressionModel& model);
ExpressionModel load_model_csv(std::string_view text);

void write_model_file(const std::filesystem::path& path, const ExpressionModel& model);
ExpressionModel read_model_file(const std::filesystem::path& path);

/// Shortest-safe decimal form with 17 significant digits.
std::string format_real(double v);

}  // namespace exprlbp
