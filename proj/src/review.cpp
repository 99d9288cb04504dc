#include "exprlbp/review.hpp"

#include <charconv>

#include "exprlbp/error.hpp"
#include "exprlbp/pgm.hpp"

namespace exprlbp {

namespace {

constexpr std::string_view kHeader = "image,x,y,w,h,neighbors,keep";

int parse_int(std::string_view s, std::size_t line) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("review line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string review_key(const std::filesystem::path& image) {
  std::error_code ec;
  auto canon = std::filesystem::weakly_canonical(image, ec);
  return (ec ? image : canon).generic_string();
}

std::string save_review_csv(const std::vector<ReviewEntry>& entries) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& e : entries) {
    if (e.image.find_first_of(",\n\r") != std::string::npos) {
      throw DataError("image path cannot be stored in a review file: " + e.image);
    }
    out += e.image + "," + std::to_string(e.rect.x) + "," + std::to_string(e.rect.y) + "," +
           std::to_string(e.rect.w) + "," + std::to_string(e.rect.h) + "," +
           std::to_string(e.neighbors) + "," + (e.keep ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<ReviewEntry> load_review_csv(std::string_view text) {
  std::vector<ReviewEntry> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kHeader) {
        throw DataError("review line " + std::to_string(line_no) + ": expected header '" +
                        std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 7) {
      throw DataError("review line " + std::to_string(line_no) + ": expected 7 fields, got " +
                      std::to_string(f.size()));
    }
    const int keep = parse_int(f[6], line_no);
    if (keep != 0 && keep != 1) {
      throw DataError("review line " + std::to_string(line_no) + ": keep must be 0 or 1");
    }
    out.push_back({std::string(f[0]),
                   {parse_int(f[1], line_no), parse_int(f[2], line_no), parse_int(f[3], line_no),
                    parse_int(f[4], line_no)},
                   parse_int(f[5], line_no),
                   keep == 1});
  }
  if (!header_seen) throw DataError("review file is empty");
  return out;
}

void write_review_file(const std::filesystem::path& path, const std::vector<ReviewEntry>& entries) {
  const std::string text = save_review_csv(entries);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<ReviewEntry> read_review_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return load_review_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace exprlbp
