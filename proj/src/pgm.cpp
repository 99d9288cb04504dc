#include "exprlbp/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace exprlbp {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long long read_uint(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw PgmError(PgmError::Kind::BadHeader, std::string("PGM header: expected ") + what);
    }
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1LL << 31)) {
        throw PgmError(PgmError::Kind::BadHeader, std::string("PGM header: ") + what + " too large");
      }
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw PgmError(PgmError::Kind::BadHeader, "PGM header: missing whitespace after maxval");
    }
    ++pos_;
  }

  [[nodiscard]] std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw PgmError(PgmError::Kind::BadMagic, "not a binary PGM: magic must be P5");
  }
  HeaderReader reader(bytes.subspan(2));
  const long long width = reader.read_uint("width");
  const long long height = reader.read_uint("height");
  const long long maxval = reader.read_uint("maxval");
  if (width < 1 || height < 1) {
    throw PgmError(PgmError::Kind::BadHeader, "PGM header: dimensions must be positive");
  }
  if (maxval < 1 || maxval > 255) {
    throw PgmError(PgmError::Kind::BadMaxval,
                   "PGM maxval " + std::to_string(maxval) + " unsupported (need 1..255)");
  }
  reader.end_header();

  const std::size_t offset = 2 + reader.pos();
  const auto need = static_cast<std::size_t>(width * height);
  if (bytes.size() - offset < need) {
    throw PgmError(PgmError::Kind::Truncated, "PGM pixel data truncated: have " +
                                                  std::to_string(bytes.size() - offset) +
                                                  " bytes, need " + std::to_string(need));
  }
  auto raster = bytes.subspan(offset, need);
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::vector<std::uint8_t>(raster.begin(), raster.end()));
}

std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

GrayImage read_pgm_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return load_pgm(bytes);
  } catch (const PgmError& e) {
    throw PgmError(e.kind(), path.string() + ": " + e.what());
  }
}

void write_pgm_file(const std::filesystem::path& path, const GrayImage& img) {
  write_file_bytes(path, save_pgm(img));
}

}  // namespace exprlbp
