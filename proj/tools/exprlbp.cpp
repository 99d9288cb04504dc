// exprlbp: train, run and evaluate the LBP + per-class PCA expression
// classifier from the command line.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 data/validation, 4 no face.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exprlbp/cascade.hpp"
#include "exprlbp/dataset.hpp"
#include "exprlbp/detect.hpp"
#include "exprlbp/error.hpp"
#include "exprlbp/evaluate.hpp"
#include "exprlbp/lbp.hpp"
#include "exprlbp/model_csv.hpp"
#include "exprlbp/pgm.hpp"
#include "exprlbp/review.hpp"

namespace fs = std::filesystem;
using namespace exprlbp;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kData = 3, kNoFace = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  // feature geometry
  int face_w = 40;
  int face_h = 40;
  std::vector<std::string> blocks{"6x6", "8x10"};
  std::vector<int> bins{8, 16};
  int k = 40;

  BilateralParams bilateral;
  DetectParams detect;

  std::string cascade_path;
  std::string review_path;
  bool pre_cropped = false;

  double test_fraction = 0.0;
  std::uint64_t seed = 7;

  FeatureConfig feature_config() const {
    if (blocks.size() != bins.size()) {
      throw UsageError("--blocks lists " + std::to_string(blocks.size()) + " levels but --bins lists " +
                       std::to_string(bins.size()));
    }
    FeatureConfig cfg;
    cfg.face_w = face_w;
    cfg.face_h = face_h;
    cfg.levels.clear();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      int h = 0;
      int w = 0;
      char x = 0;
      char tail = 0;
      if (std::sscanf(blocks[i].c_str(), "%d%c%d%c", &h, &x, &w, &tail) != 3 || (x != 'x' && x != 'X')) {
        throw UsageError("--blocks entry '" + blocks[i] + "' is not HxW");
      }
      cfg.levels.push_back({h, w, bins[i]});
    }
    cfg.validate();
    return cfg;
  }

  std::optional<HaarCascade> load_cascade() const {
    if (cascade_path.empty()) return std::nullopt;
    return read_cascade_file(cascade_path);
  }

  // Requires a face source unless images are pre-cropped.
  void require_face_source(bool review_allowed) const {
    if (pre_cropped) return;
    if (!cascade_path.empty()) return;
    if (review_allowed && !review_path.empty()) return;
    throw UsageError(review_allowed ? "need --pre-cropped, --cascade or --review"
                                    : "need --pre-cropped or --cascade");
  }
};

void add_feature_flags(CLI::App& cmd, CliConfig& cfg) {
  cmd.add_option("--face-w", cfg.face_w, "Face width N after resize")->group("Features");
  cmd.add_option("--face-h", cfg.face_h, "Face height M after resize")->group("Features");
  cmd.add_option("--blocks", cfg.blocks, "Block sizes HxW per level, comma-separated")
      ->delimiter(',')
      ->group("Features");
  cmd.add_option("--bins", cfg.bins, "Histogram bins per level, comma-separated")
      ->delimiter(',')
      ->group("Features");
}

void add_preprocess_flags(CLI::App& cmd, CliConfig& cfg) {
  cmd.add_option("--bilateral-radius", cfg.bilateral.radius, "Bilateral window radius")
      ->group("Preprocess");
  cmd.add_option("--sigma-spatial", cfg.bilateral.sigma_spatial, "Bilateral spatial sigma (px)")
      ->group("Preprocess");
  cmd.add_option("--sigma-range", cfg.bilateral.sigma_range, "Bilateral range sigma (intensity)")
      ->group("Preprocess");
}

void add_detect_flags(CLI::App& cmd, CliConfig& cfg, bool with_cascade = true) {
  if (with_cascade) {
    cmd.add_option("--cascade", cfg.cascade_path, "Face cascade JSON")->group("Detection");
  }
  cmd.add_option("--scale-factor", cfg.detect.scale_factor, "Window growth per pyramid level")
      ->group("Detection");
  cmd.add_option("--step", cfg.detect.step, "Scan step at base scale (px)")->group("Detection");
  cmd.add_option("--min-neighbors", cfg.detect.min_neighbors, "Raw hits needed per detection")
      ->group("Detection");
  cmd.add_option("--min-size", cfg.detect.min_size, "Minimum window width, 0 = base width")
      ->group("Detection");
}

void add_split_flags(CLI::App& cmd, CliConfig& cfg, const char* role) {
  cmd.add_option("--test-fraction", cfg.test_fraction,
                 std::string("Stratified split; use only the ") + role + " side (0 = use everything)")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--seed", cfg.seed, "Split seed");
}

DatasetManifest select_split(const DatasetManifest& all, const CliConfig& cfg, bool want_test) {
  if (cfg.test_fraction <= 0.0) return all;
  auto [train, test] = split(all, cfg.test_fraction, cfg.seed);
  return want_test ? test : train;
}

std::string scores_line(const ClassScores& s) {
  std::string out;
  for (double e : s.errors) out += format_real(e) + ",";
  out += std::string(to_string(s.predicted));
  return out;
}

// ---------------------------------------------------------------- train

int cmd_train(const CliConfig& cfg, const std::string& dataset, const std::string& model_out) {
  cfg.require_face_source(true);
  const FeatureConfig fcfg = cfg.feature_config();
  const DatasetManifest manifest = select_split(scan_dataset(dataset), cfg, false);

  std::map<std::string, ReviewEntry> reviewed;
  if (!cfg.review_path.empty()) {
    for (const auto& e : read_review_file(cfg.review_path)) {
      if (!e.keep) continue;
      auto [it, fresh] = reviewed.try_emplace(review_key(e.image), e);
      if (!fresh && e.neighbors > it->second.neighbors) it->second = e;
    }
  }
  const auto cascade = cfg.load_cascade();
  FaceSource source{cfg.pre_cropped, cascade ? &*cascade : nullptr, cfg.detect};

  std::vector<LabeledImage> images;
  std::vector<Rect> faces;
  std::size_t skipped = 0;
  for (const auto& entry : manifest.entries) {
    GrayImage img = read_pgm_file(entry.path);
    std::optional<Rect> face;
    if (cfg.pre_cropped) {
      face = img.bounds();
    } else if (!cfg.review_path.empty()) {
      if (auto it = reviewed.find(review_key(entry.path)); it != reviewed.end()) face = it->second.rect;
    } else {
      face = locate_face(img, source);
    }
    if (!face) {
      ++skipped;
      continue;
    }
    images.push_back({std::move(img), entry.label});
    faces.push_back(*face);
  }
  if (skipped) std::cerr << "skipped " << skipped << " image(s) without an accepted face\n";
  if (manifest.ignored_files) std::cerr << "ignored " << manifest.ignored_files << " non-pgm file(s)\n";

  const ExpressionModel model = train_from_faces(images, faces, cfg.k, fcfg, cfg.bilateral);
  write_model_file(model_out, model);

  std::array<std::size_t, kNumExpressions> counts{};
  for (const auto& li : images) ++counts[index_of(li.label)];
  std::cout << "feature_dim " << feature_dim(fcfg) << "\n";
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    std::cout << kExpressionNames[c] << " samples " << counts[c] << " k " << model.classes[c].rank()
              << "\n";
  }
  std::cout << "model written to " << model_out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- classify

int cmd_classify(const CliConfig& cfg, const std::string& model_path, const std::string& image_path,
                 bool porcelain) {
  cfg.require_face_source(false);
  const ExpressionModel model = read_model_file(model_path);
  model.validate();
  const GrayImage img = read_pgm_file(image_path);
  const auto cascade = cfg.load_cascade();
  const FaceSource source{cfg.pre_cropped, cascade ? &*cascade : nullptr, cfg.detect};
  const auto face = locate_face(img, source);
  if (!face) throw NoFaceError("no face found in " + image_path);

  const PreprocessConfig pre = preprocess_for(model.feature_config, cfg.bilateral);
  const FeatureVector fv = face_features(img, *face, pre, model.feature_config);
  const ClassScores scores = classify(model, fv.values);

  if (porcelain) {
    std::cout << scores_line(scores) << "\n";
    return kOk;
  }
  if (!cfg.pre_cropped) {
    std::cout << "face " << face->x << "," << face->y << "," << face->w << "," << face->h << "\n";
  }
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    std::cout << kExpressionNames[c] << " " << format_real(scores.errors[c]) << "\n";
  }
  std::cout << "predicted " << to_string(scores.predicted) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const CliConfig& cfg, const std::string& model_path, const std::string& dataset,
                 const std::string& report_path) {
  cfg.require_face_source(false);
  const ExpressionModel model = read_model_file(model_path);
  model.validate();
  const DatasetManifest manifest = select_split(scan_dataset(dataset), cfg, true);
  const auto cascade = cfg.load_cascade();
  const FaceSource source{cfg.pre_cropped, cascade ? &*cascade : nullptr, cfg.detect};
  const EvalReport rep =
      evaluate(model, manifest, preprocess_for(model.feature_config, cfg.bilateral), source);
  const std::string csv = report_to_csv(rep);
  if (!report_path.empty()) {
    write_file_bytes(report_path,
                     std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  }
  std::cout << csv;
  std::printf("evaluated %zu unreadable %zu no_face %zu\n", rep.evaluated, rep.unreadable, rep.no_face);
  std::printf("accuracy %.6f\n", rep.overall_accuracy);
  std::printf("mean_latency_ms %.6f\n", rep.mean_latency_s * 1e3);
  return kOk;
}

// ---------------------------------------------------------------- detect

int cmd_detect(const CliConfig& cfg, const std::vector<std::string>& images,
               const std::string& review_out) {
  if (cfg.cascade_path.empty()) throw UsageError("detect needs --cascade");
  const HaarCascade cascade = read_cascade_file(cfg.cascade_path);
  std::vector<ReviewEntry> review;
  const bool prefix = images.size() > 1;
  for (const auto& path : images) {
    const GrayImage img = read_pgm_file(path);
    for (const auto& d : detect_faces(img, cascade, cfg.detect)) {
      if (prefix) std::cout << path << ",";
      std::cout << d.rect.x << "," << d.rect.y << "," << d.rect.w << "," << d.rect.h << ","
                << d.neighbors << "\n";
      review.push_back({review_key(path), d.rect, d.neighbors, true});
    }
  }
  if (!review_out.empty()) write_review_file(review_out, review);
  return kOk;
}

// ---------------------------------------------------------------- extract-features

int cmd_extract(const CliConfig& cfg, const std::vector<std::string>& images, const std::string& out_path) {
  cfg.require_face_source(false);
  const FeatureConfig fcfg = cfg.feature_config();
  const PreprocessConfig pre = preprocess_for(fcfg, cfg.bilateral);
  const auto cascade = cfg.load_cascade();
  const FaceSource source{cfg.pre_cropped, cascade ? &*cascade : nullptr, cfg.detect};
  std::string out;
  for (const auto& path : images) {
    const GrayImage img = read_pgm_file(path);
    const auto face = locate_face(img, source);
    if (!face) throw NoFaceError("no face found in " + path);
    const FeatureVector fv = face_features(img, *face, pre, fcfg);
    out += path;
    for (double v : fv.values) out += "," + format_real(v);
    out += "\n";
  }
  if (out_path.empty()) {
    std::cout << out;
  } else {
    write_file_bytes(out_path, std::span(reinterpret_cast<const std::uint8_t*>(out.data()), out.size()));
  }
  return kOk;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const std::string& out_dir, std::uint64_t seed, int per_class, int noise) {
  const auto images = synth_dataset(seed, per_class, noise);
  const auto manifest = write_dataset(out_dir, images);
  std::cout << "wrote " << manifest.entries.size() << " images to " << out_dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Facial expression classification with block LBP histograms and per-class PCA"};
  app.require_subcommand(1);
  app.fallthrough();  // --config may follow the subcommand
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML/INI file with flag values (flags on the command line win)");

  CliConfig cfg;

  std::string dataset;
  std::string model_path;
  std::string image_path;
  std::string report_path;
  std::string review_out;
  std::string out_path;
  std::vector<std::string> images;
  bool porcelain = false;
  std::uint64_t synth_seed = 7;
  int per_class = 90;
  int noise = 10;

  auto* train = app.add_subcommand("train", "Fit per-class subspaces from a labeled dataset");
  train->add_option("dataset", dataset, "Dataset root with one directory per expression")->required();
  train->add_option("-o,--model-out", model_path, "Model CSV to write")->required();
  train->add_option("-k,--k", cfg.k, "Eigenvectors kept per class")->check(CLI::PositiveNumber);
  train->add_flag("--pre-cropped", cfg.pre_cropped, "Images are already face crops");
  train->add_option("--review", cfg.review_path, "Reviewed detection manifest (keep=1 rows used)");
  add_feature_flags(*train, cfg);
  add_preprocess_flags(*train, cfg);
  add_detect_flags(*train, cfg);
  add_split_flags(*train, cfg, "train");

  auto* classify_cmd = app.add_subcommand("classify", "Score one image against every class");
  classify_cmd->add_option("model", model_path, "Model CSV")->required();
  classify_cmd->add_option("image", image_path, "PGM image")->required();
  classify_cmd->add_flag("--pre-cropped", cfg.pre_cropped, "Image is already a face crop");
  classify_cmd->add_flag("--porcelain", porcelain, "One CSV line: six errors then the label");
  add_preprocess_flags(*classify_cmd, cfg);
  add_detect_flags(*classify_cmd, cfg);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Confusion matrix over a labeled dataset");
  evaluate_cmd->add_option("model", model_path, "Model CSV")->required();
  evaluate_cmd->add_option("dataset", dataset, "Dataset root")->required();
  evaluate_cmd->add_option("--report", report_path, "Write the report CSV here");
  evaluate_cmd->add_flag("--pre-cropped", cfg.pre_cropped, "Images are already face crops");
  add_preprocess_flags(*evaluate_cmd, cfg);
  add_detect_flags(*evaluate_cmd, cfg);
  add_split_flags(*evaluate_cmd, cfg, "test");

  auto* detect_cmd = app.add_subcommand("detect", "Run the face cascade over images");
  detect_cmd->add_option("images", images, "PGM images")->required();
  detect_cmd->add_option("--review-out", review_out, "Write an editable review manifest");
  add_detect_flags(*detect_cmd, cfg);

  auto* extract_cmd = app.add_subcommand("extract-features", "Dump feature vectors, one CSV row per image");
  extract_cmd->add_option("images", images, "PGM images")->required();
  extract_cmd->add_option("-o,--out", out_path, "Output CSV (default stdout)");
  extract_cmd->add_flag("--pre-cropped", cfg.pre_cropped, "Images are already face crops");
  add_feature_flags(*extract_cmd, cfg);
  add_preprocess_flags(*extract_cmd, cfg);
  add_detect_flags(*extract_cmd, cfg);

  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic six-texture dataset");
  synth_cmd->add_option("out", out_path, "Output dataset root")->required();
  synth_cmd->add_option("--seed", synth_seed, "Noise seed");
  synth_cmd->add_option("--per-class", per_class, "Images per class")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", noise, "Uniform noise amplitude")->check(CLI::Range(0, 255));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (train->parsed()) return cmd_train(cfg, dataset, model_path);
    if (classify_cmd->parsed()) return cmd_classify(cfg, model_path, image_path, porcelain);
    if (evaluate_cmd->parsed()) return cmd_evaluate(cfg, model_path, dataset, report_path);
    if (detect_cmd->parsed()) return cmd_detect(cfg, images, review_out);
    if (extract_cmd->parsed()) return cmd_extract(cfg, images, out_path);
    if (synth_cmd->parsed()) return cmd_synth(out_path, synth_seed, per_class, noise);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const NoFaceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoFace;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
