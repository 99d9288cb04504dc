#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "exprlbp/expression.hpp"
#include "exprlbp/image.hpp"

namespace exprlbp {

struct ManifestEntry {
  std::filesystem::path path;
  Expression label = Expression::Anger;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  int ignored_files = 0;  // non-.pgm entries skipped by scan_dataset

  [[nodiscard]] std::array<std::size_t, kNumExpressions> counts() const;
};

/// Lists root/<label>/*.pgm for the six canonical label directories, sorted
/// lexicographically by path. Throws IoError for a missing class directory.
DatasetManifest scan_dataset(const std::filesystem::path& root);

/// Stratified split: each class is shuffled with `seed` and round(fraction * n)
/// of its images (at least one, at most n - 1) go to the test side.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double test_fraction, std::uint64_t seed);

struct LabeledImage {
  GrayImage image;
  Expression label = Expression::Anger;
};

/// Noise-free 40x40 texture standing in for one expression.
GrayImage synth_archetype(Expression e);

/// `per_class` copies of each archetype with seeded uniform noise in
/// [-noise_level, noise_level] (clamped to 0..255), class-major order.
std::vector<LabeledImage> synth_dataset(std::uint64_t seed, int per_class, int noise_level);

/// Writes images as root/<label>/<label>_NNNN.pgm and returns the manifest.
DatasetManifest write_dataset(const std::filesystem::path& root,
                              const std::vector<LabeledImage>& images);

/// Reads every image of a manifest. Throws on the first unreadable file.
std::vector<LabeledImage> load_images(const DatasetManifest& manifest);

}  // namespace exprlbp
