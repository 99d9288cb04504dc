#include "exprlbp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "exprlbp/error.hpp"
#include "exprlbp/pgm.hpp"
#include "exprlbp/rng.hpp"

namespace fs = std::filesystem;

namespace exprlbp {

std::array<std::size_t, kNumExpressions> DatasetManifest::counts() const {
  std::array<std::size_t, kNumExpressions> c{};
  for (const auto& e : entries) ++c[index_of(e.label)];
  return c;
}

DatasetManifest scan_dataset(const fs::path& root) {
  DatasetManifest m;
  m.root = root;
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    const fs::path dir = root / std::string(kExpressionNames[c]);
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      throw IoError("dataset " + root.string() + ": missing class directory " +
                    std::string(kExpressionNames[c]) + "/");
    }
    for (const auto& item : fs::directory_iterator(dir, ec)) {
      if (item.is_regular_file() && item.path().extension() == ".pgm") {
        m.entries.push_back({item.path(), kExpressions[c]});
      } else {
        ++m.ignored_files;
      }
    }
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return m;
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test fraction must lie strictly between 0 and 1");
  }
  DatasetManifest train{manifest.root, {}, 0};
  DatasetManifest test{manifest.root, {}, 0};
  DeterministicRng rng(seed);
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    std::vector<ManifestEntry> cls;
    for (const auto& e : manifest.entries) {
      if (index_of(e.label) == c) cls.push_back(e);
    }
    if (cls.empty()) continue;
    if (cls.size() < 2) {
      throw DataError("class " + std::string(kExpressionNames[c]) +
                      " has fewer than 2 images and cannot be split");
    }
    rng.shuffle(cls.begin(), cls.end());
    const auto n = static_cast<long long>(cls.size());
    const long long n_test = std::clamp(std::llround(test_fraction * static_cast<double>(n)), 1LL, n - 1);
    test.entries.insert(test.entries.end(), cls.begin(), cls.begin() + n_test);
    train.entries.insert(train.entries.end(), cls.begin() + n_test, cls.end());
  }
  auto by_path = [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; };
  std::sort(train.entries.begin(), train.entries.end(), by_path);
  std::sort(test.entries.begin(), test.entries.end(), by_path);
  return {std::move(train), std::move(test)};
}

GrayImage synth_archetype(Expression e) {
  constexpr int kSize = 40;
  constexpr std::uint8_t kLow = 60;
  constexpr std::uint8_t kHigh = 190;
  GrayImage img(kSize, kSize);
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      bool on = false;
      switch (e) {
        case Expression::Anger:  // horizontal bars
          on = (y / 3) % 2 == 0;
          break;
        case Expression::Disgust:  // vertical bars
          on = (x / 3) % 2 == 0;
          break;
        case Expression::Fear:  // diagonal bars
          on = ((x + y) / 4) % 2 == 0;
          break;
        case Expression::Happiness:  // checkerboard
          on = ((x / 4) + (y / 4)) % 2 == 0;
          break;
        case Expression::Sadness: {  // concentric rings
          const double r = std::hypot(x - 19.5, y - 19.5);
          on = static_cast<int>(r / 3.0) % 2 == 0;
          break;
        }
        case Expression::Surprise:  // anti-diagonal bars
          on = ((x - y + kSize) / 4) % 2 == 0;
          break;
      }
      img.at(x, y) = on ? kHigh : kLow;
    }
  }
  return img;
}

std::vector<LabeledImage> synth_dataset(std::uint64_t seed, int per_class, int noise_level) {
  if (per_class < 1) throw DataError("per_class must be >= 1");
  if (noise_level < 0 || noise_level > 255) throw DataError("noise level must be in [0, 255]");
  DeterministicRng rng(seed);
  std::vector<LabeledImage> out;
  out.reserve(kNumExpressions * static_cast<std::size_t>(per_class));
  for (Expression e : kExpressions) {
    const GrayImage base = synth_archetype(e);
    for (int i = 0; i < per_class; ++i) {
      GrayImage img = base;
      if (noise_level > 0) {
        for (auto& px : img.pixels()) {
          px = static_cast<std::uint8_t>(
              std::clamp(px + rng.uniform_int(-noise_level, noise_level), 0, 255));
        }
      }
      out.push_back({std::move(img), e});
    }
  }
  return out;
}

DatasetManifest write_dataset(const fs::path& root, const std::vector<LabeledImage>& images) {
  DatasetManifest m;
  m.root = root;
  std::array<int, kNumExpressions> next{};
  for (const auto name : kExpressionNames) {
    std::error_code ec;
    fs::create_directories(root / std::string(name), ec);
    if (ec) throw IoError("cannot create " + (root / std::string(name)).string() + ": " + ec.message());
  }
  for (const auto& li : images) {
    const std::string name(to_string(li.label));
    char file[64];
    std::snprintf(file, sizeof file, "%s_%04d.pgm", name.c_str(), next[index_of(li.label)]++);
    const fs::path path = root / name / file;
    write_pgm_file(path, li.image);
    m.entries.push_back({path, li.label});
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return m;
}

std::vector<LabeledImage> load_images(const DatasetManifest& manifest) {
  std::vector<LabeledImage> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) out.push_back({read_pgm_file(e.path), e.label});
  return out;
}

}  // namespace exprlbp
