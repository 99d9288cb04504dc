#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "exprlbp/error.hpp"
#include "exprlbp/image.hpp"

namespace exprlbp {

/// Distinguishes the ways a PGM byte stream can be rejected.
class PgmError : public DataError {
 public:
  enum class Kind { BadMagic, BadHeader, BadMaxval, Truncated };

  PgmError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Decodes binary PGM (P5, maxval <= 255). `#` comments are allowed between
/// header tokens. Pixel values are kept as stored, without maxval rescaling.
GrayImage load_pgm(std::span<const std::uint8_t> bytes);

/// Encodes as "P5\n<w> <h>\n255\n" followed by the raw pixels.
std::vector<std::uint8_t> save_pgm(const GrayImage& img);

GrayImage read_pgm_file(const std::filesystem::path& path);
void write_pgm_file(const std::filesystem::path& path, const GrayImage& img);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace exprlbp
