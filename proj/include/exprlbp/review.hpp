#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "exprlbp/image.hpp"

namespace exprlbp {

/// One detection awaiting human review. Setting keep to 0 rejects it; the
/// training step uses only kept rows.
struct ReviewEntry {
  std::string image;
  Rect rect;
  int neighbors = 0;
  bool keep = true;

  friend bool operator==(const ReviewEntry&, const ReviewEntry&) = default;
};

/// CSV with header "image,x,y,w,h,neighbors,keep". Lines starting with '#'
/// are comments.
std::string save_review_csv(const std::vector<ReviewEntry>& entries);
std::vector<ReviewEntry> load_review_csv(std::string_view text);

void write_review_file(const std::filesystem::path& path, const std::vector<ReviewEntry>& entries);
std::vector<ReviewEntry> read_review_file(const std::filesystem::path& path);

/// Canonical string form used to match review rows against dataset paths.
std::string review_key(const std::filesystem::path& image);

}  // namespace exprlbp
