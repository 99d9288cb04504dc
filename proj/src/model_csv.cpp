#include "exprlbp/model_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "exprlbp/pgm.hpp"

namespace exprlbp {

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void append_row(std::string& out, std::string_view tag, std::span<const double> values,
                const double* lead = nullptr) {
  out += tag;
  if (lead) {
    out += ',';
    out += format_real(*lead);
  }
  for (double v : values) {
    out += ',';
    out += format_real(v);
  }
  out += '\n';
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

class LineCursor {
 public:
  explicit LineCursor(std::string_view text) : text_(text) {}

  // Returns the split fields of the next non-empty line, or an empty vector at EOF.
  std::vector<std::string_view> next() {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) return split_fields(line);
    }
    return {};
  }

  std::vector<std::string_view> expect(std::string_view tag) {
    auto fields = next();
    if (fields.empty()) fail("unexpected end of file, expected '" + std::string(tag) + "' row");
    if (fields[0] != tag) {
      fail("expected '" + std::string(tag) + "' row, found '" + std::string(fields[0]) + "'");
    }
    return fields;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ModelFormatError(line_no_, "model line " + std::to_string(line_no_) + ": " + what);
  }

  long long to_int(std::string_view s, const char* what) const {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(std::string("bad integer for ") + what + ": '" + std::string(s) + "'");
    }
    return v;
  }

  double to_real(std::string_view s) const {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("bad real value '" + std::string(s) + "'");
    }
    return v;
  }

  void expect_count(const std::vector<std::string_view>& fields, std::size_t n) const {
    if (fields.size() != n) {
      fail("'" + std::string(fields[0]) + "' row has " + std::to_string(fields.size() - 1) +
           " values, expected " + std::to_string(n - 1));
    }
  }

  std::vector<double> reals(const std::vector<std::string_view>& fields, std::size_t from) const {
    std::vector<double> out;
    out.reserve(fields.size() - from);
    for (std::size_t i = from; i < fields.size(); ++i) out.push_back(to_real(fields[i]));
    return out;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string save_model_csv(const ExpressionModel& model) {
  model.validate();
  const auto& cfg = model.feature_config;
  std::string out = "exprlbp-model," + model.format_version + "\n";
  out += "config," + std::to_string(cfg.face_w) + "," + std::to_string(cfg.face_h) + "\n";
  for (const auto& l : cfg.levels) {
    out += "level," + std::to_string(l.block_h) + "," + std::to_string(l.block_w) + "," +
           std::to_string(l.bins) + "\n";
  }
  for (const auto& cm : model.classes) {
    out += "class," + std::string(to_string(cm.label)) + "," + std::to_string(cm.rank()) + "," +
           std::to_string(cm.dim()) + "\n";
    append_row(out, "mean", cm.mean);
    for (std::size_t i = 0; i < cm.rank(); ++i) append_row(out, "eig", cm.basis[i], &cm.eigenvalues[i]);
  }
  return out;
}

ExpressionModel load_model_csv(std::string_view text) {
  LineCursor cur(text);
  auto fields = cur.expect("exprlbp-model");
  cur.expect_count(fields, 2);
  if (fields[1] != ExpressionModel::kFormatVersion) {
    cur.fail("unsupported model format version '" + std::string(fields[1]) + "'");
  }

  ExpressionModel model;
  fields = cur.expect("config");
  cur.expect_count(fields, 3);
  model.feature_config.face_w = static_cast<int>(cur.to_int(fields[1], "face_w"));
  model.feature_config.face_h = static_cast<int>(cur.to_int(fields[2], "face_h"));
  model.feature_config.levels.clear();

  fields = cur.next();
  while (!fields.empty() && fields[0] == "level") {
    cur.expect_count(fields, 4);
    model.feature_config.levels.push_back({static_cast<int>(cur.to_int(fields[1], "block_h")),
                                           static_cast<int>(cur.to_int(fields[2], "block_w")),
                                           static_cast<int>(cur.to_int(fields[3], "bins"))});
    fields = cur.next();
  }
  try {
    model.feature_config.validate();
  } catch (const DataError& e) {
    cur.fail(e.what());
  }
  const std::size_t d = feature_dim(model.feature_config);

  for (std::size_t c = 0; c < kNumExpressions; ++c) {
    if (fields.empty()) cur.fail("unexpected end of file, expected 'class' row");
    if (fields[0] != "class") cur.fail("expected 'class' row, found '" + std::string(fields[0]) + "'");
    cur.expect_count(fields, 4);
    if (fields[1] != kExpressionNames[c]) {
      cur.fail("class '" + std::string(fields[1]) + "' out of order, expected '" +
               std::string(kExpressionNames[c]) + "'");
    }
    const long long k = cur.to_int(fields[2], "K");
    const long long dim = cur.to_int(fields[3], "D");
    if (dim != static_cast<long long>(d)) {
      cur.fail("class dimension " + std::to_string(dim) + " != feature dimension " +
               std::to_string(d));
    }
    if (k < 0 || k > dim) cur.fail("class rank " + std::to_string(k) + " out of range");

    ClassModel cm;
    cm.label = kExpressions[c];
    cm.k_requested = static_cast<int>(k);
    fields = cur.expect("mean");
    cur.expect_count(fields, d + 1);
    cm.mean = cur.reals(fields, 1);
    for (long long i = 0; i < k; ++i) {
      fields = cur.expect("eig");
      cur.expect_count(fields, d + 2);
      cm.eigenvalues.push_back(cur.to_real(fields[1]));
      cm.basis.push_back(cur.reals(fields, 2));
    }
    model.classes.push_back(std::move(cm));
    fields = cur.next();
  }
  if (!fields.empty()) cur.fail("trailing '" + std::string(fields[0]) + "' row after last class");
  return model;
}

void write_model_file(const std::filesystem::path& path, const ExpressionModel& model) {
  const std::string text = save_model_csv(model);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ExpressionModel read_model_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return load_model_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const ModelFormatError& e) {
    throw ModelFormatError(e.line(), path.string() + ": " + e.what());
  }
}

}  // namespace exprlbp
