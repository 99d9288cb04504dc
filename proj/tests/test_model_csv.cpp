#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "exprlbp/model_csv.hpp"

using namespace exprlbp;

namespace {

// One whole-face level with `dim` bins gives a D = dim feature space.
FeatureConfig small_config(int dim) { return FeatureConfig{4, 4, {{4, 4, dim}}}; }

ExpressionModel random_model(std::mt19937& rng, int dim, int per_class, int k) {
  std::normal_distribution<double> noise(0.0, 1.0);
  SamplesByClass samples;
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> v(dim);
      for (int d = 0; d < dim; ++d) v[d] = noise(rng) + (d % kNumExpressions == static_cast<int>(c) ? 5.0 : 0.0);
      samples[c].push_back(std::move(v));
    }
  }
  return train_model(samples, k, small_config(dim));
}

std::size_t model_line_of(const std::string& text) {
  try {
    load_model_csv(text);
  } catch (const ModelFormatError& e) {
    CHECK(std::string(e.what()).find("model line " + std::to_string(e.line())) == 0);
    return e.line();
  }
  FAIL("expected ModelFormatError");
  return 0;
}

std::string replace_line(const std::string& text, std::size_t line, const std::string& with) {
  std::string out;
  std::size_t pos = 0;
  for (std::size_t n = 1; pos < text.size(); ++n) {
    const std::size_t end = text.find('\n', pos);
    out += n == line ? with : text.substr(pos, end - pos);
    out += '\n';
    pos = end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("format_real keeps 17 significant digits and round-trips") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(-2.5) == "-2.5");
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    REQUIRE(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("model with every class at rank 0 round-trips exactly") {
  SamplesByClass samples;
  for (std::size_t c = 0; c < kNumExpressions; ++c) samples[c].push_back(std::vector<double>(8, 0.125 * c));
  const ExpressionModel model = train_model(samples, 40, small_config(8));
  const std::string text = save_model_csv(model);
  const ExpressionModel back = load_model_csv(text);
  REQUIRE(back.classes.size() == kNumExpressions);
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    CHECK(back.classes[c].rank() == 0);
    CHECK(back.classes[c].mean == model.classes[c].mean);
    CHECK(back.classes[c].label == kExpressions[c]);
  }
  CHECK(save_model_csv(back) == text);
}

TEST_CASE("trained model round-trips bit-for-bit") {
  std::mt19937 rng(42);
  const ExpressionModel model = random_model(rng, 24, 9, 5);
  const std::string text = save_model_csv(model);
  CHECK(text.rfind("exprlbp-model,1\nconfig,4,4\nlevel,4,4,24\nclass,anger,5,24\nmean,", 0) == 0);
  const ExpressionModel back = load_model_csv(text);
  CHECK(back.feature_config.id() == model.feature_config.id());
  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    CHECK(back.classes[c].eigenvalues == model.classes[c].eigenvalues);
    CHECK(back.classes[c].basis == model.classes[c].basis);
    CHECK(back.classes[c].k_requested == 5);
  }
  std::normal_distribution<double> noise(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> g(24);
    for (double& v : g) v = noise(rng);
    const ClassScores a = classify(model, g);
    const ClassScores b = classify(back, g);
    CHECK(a.predicted == b.predicted);
    for (std::size_t c = 0; c < kNumExpressions; ++c) CHECK(std::abs(a.errors[c] - b.errors[c]) <= 1e-12);
  }
}

TEST_CASE("loader tolerates CRLF and blank lines") {
  std::mt19937 rng(43);
  const ExpressionModel model = random_model(rng, 6, 3, 2);
  const std::string text = save_model_csv(model);
  std::string crlf;
  for (char ch : text) {
    if (ch == '\n') crlf += "\r\n\r\n";
    else crlf += ch;
  }
  CHECK(save_model_csv(load_model_csv(crlf)) == text);
}

TEST_CASE("file helpers") {
  std::mt19937 rng(44);
  const ExpressionModel model = random_model(rng, 6, 3, 2);
  const auto path = std::filesystem::temp_directory_path() / "exprlbp_test_model.csv";
  write_model_file(path, model);
  CHECK(save_model_csv(read_model_file(path)) == save_model_csv(model));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_model_file(path), IoError);
}

TEST_CASE("malformed models name the offending line") {
  std::mt19937 rng(45);
  const std::string text = save_model_csv(random_model(rng, 6, 3, 2));
  // Line 4 is "class,anger,2,6", line 5 its mean, lines 6-7 its eigenpairs.

  SUBCASE("version mismatch") { CHECK(model_line_of(replace_line(text, 1, "exprlbp-model,2")) == 1); }

  SUBCASE("wrong vector length") {
    CHECK(model_line_of(replace_line(text, 5, "mean,1,2,3")) == 5);
    CHECK(model_line_of(replace_line(text, 6, "eig,1,0,0,0,0,0")) == 6);
  }

  SUBCASE("classes out of order") {
    CHECK(model_line_of(replace_line(text, 4, "class,disgust,2,6")) == 4);
  }

  SUBCASE("dimension disagrees with the feature config") {
    CHECK(model_line_of(replace_line(text, 4, "class,anger,2,7")) == 4);
  }

  SUBCASE("bad real value") {
    CHECK(model_line_of(replace_line(text, 5, "mean,1,2,3,4,5,x")) == 5);
  }

  SUBCASE("truncated file") {
    CHECK(model_line_of(text.substr(0, text.find("class,disgust"))) > 0);
  }

  SUBCASE("not a model at all") { CHECK(model_line_of("hello\n") == 1); }
}

TEST_CASE("save refuses structurally invalid models") {
  ExpressionModel model;
  CHECK_THROWS_AS(save_model_csv(model), DataError);
}
