#include "ptmap/feature_bank.hpp"

#include "ptmap/error.hpp"
#include "ptmap/rng.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace ptmap {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'S', 'B', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8 + 8 + 1;

std::string printable_magic(const std::uint8_t* bytes) {
  std::ostringstream out;
  for (int i = 0; i < 4; ++i) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    if (c >= 0x20 && c < 0x7f) {
      out << static_cast<char>(c);
    } else {
      out << "\\x" << std::hex << static_cast<int>(c) << std::dec;
    }
  }
  return out.str();
}

class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  const std::vector<std::uint8_t>& data() const { return buf_; }
  void reserve(std::size_t n) { buf_.reserve(n); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<std::uint8_t> buf) : buf_(std::move(buf)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }
  const std::uint8_t* cursor() const { return buf_.data() + pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      fail(ErrorKind::format, "truncated file: expected " + std::to_string(n) + " bytes of " + what +
                                  " at byte offset " + std::to_string(pos_) + ", found " +
                                  std::to_string(remaining()));
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return buf_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "read failure on '" + path.string() + "'");
  return buf;
}

}  // namespace

FeatureBank FeatureBank::create(MatrixF features, Labels labels, std::size_t num_classes, bool raw) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (n == 0) fail(ErrorKind::validation, "feature bank has no samples");
  if (features.cols() == 0) fail(ErrorKind::validation, "feature bank has zero dimension");
  if (labels.size() != n) {
    fail(ErrorKind::validation, "label count " + std::to_string(labels.size()) + " does not match row count " +
                                    std::to_string(n));
  }
  if (num_classes == 0) fail(ErrorKind::validation, "feature bank declares zero classes");

  FeatureBank bank;
  bank.class_rows_.resize(num_classes);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= num_classes) {
      fail(ErrorKind::validation, "row " + std::to_string(i) + ": label " + std::to_string(labels[i]) +
                                      " >= num_classes " + std::to_string(num_classes));
    }
    for (Eigen::Index k = 0; k < features.cols(); ++k) {
      const float v = features(static_cast<Eigen::Index>(i), k);
      if (!std::isfinite(v)) {
        fail(ErrorKind::validation, "row " + std::to_string(i) + ", column " + std::to_string(k) +
                                        ": non-finite feature value");
      }
      if (raw && v < 0.0f) {
        fail(ErrorKind::validation, "row " + std::to_string(i) + ", column " + std::to_string(k) +
                                        ": negative value in a bank flagged raw");
      }
    }
    bank.class_rows_[labels[i]].push_back(static_cast<std::uint32_t>(i));
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (bank.class_rows_[c].empty()) {
      fail(ErrorKind::validation, "class " + std::to_string(c) + " has no samples");
    }
  }
  bank.features_ = std::move(features);
  bank.labels_ = std::move(labels);
  bank.raw_ = raw;
  return bank;
}

bool operator==(const FeatureBank& a, const FeatureBank& b) {
  if (a.raw_ != b.raw_ || a.num_classes() != b.num_classes() || a.labels_ != b.labels_) return false;
  if (a.features_.rows() != b.features_.rows() || a.features_.cols() != b.features_.cols()) return false;
  // Bitwise so that -0.0f and 0.0f are distinguished, as on disk.
  return std::memcmp(a.features_.data(), b.features_.data(), sizeof(float) * a.features_.size()) == 0;
}

void SynthSpec::validate() const {
  if (w_classes < 1) fail(ErrorKind::config, "synth: w_classes must be >= 1");
  if (per_class < 1) fail(ErrorKind::config, "synth: per_class must be >= 1");
  if (d < 1) fail(ErrorKind::config, "synth: d must be >= 1");
  if (!(center_scale >= 0.0) || !std::isfinite(center_scale)) {
    fail(ErrorKind::config, "synth: center_scale must be finite and >= 0");
  }
  if (!(noise_scale > 0.0) || !std::isfinite(noise_scale)) {
    fail(ErrorKind::config, "synth: noise_scale must be finite and > 0");
  }
}

FeatureBank load_bank(const std::filesystem::path& path) {
  ByteReader in(read_file(path));

  in.need(4, "magic");
  if (std::memcmp(in.cursor(), kMagic.data(), 4) != 0) {
    fail(ErrorKind::format, "bad magic '" + printable_magic(in.cursor()) + "' at byte offset 0 (expected 'FSB1')");
  }
  in.skip(4);
  const std::uint32_t version = in.u32("version");
  if (version != kVersion) {
    fail(ErrorKind::format, "unsupported version " + std::to_string(version) + " at byte offset 4");
  }
  const std::uint64_t n = in.u64("sample count");
  const std::uint64_t d = in.u64("dimension");
  const std::uint64_t num_classes = in.u64("class count");
  const std::size_t flag_offset = in.offset();
  const std::uint8_t raw_flag = in.u8("raw flag");
  if (raw_flag > 1) {
    fail(ErrorKind::format, "raw flag must be 0 or 1, found " + std::to_string(raw_flag) + " at byte offset " +
                                std::to_string(flag_offset));
  }
  if (n == 0) fail(ErrorKind::validation, "feature bank has no samples");
  if (d == 0) fail(ErrorKind::validation, "feature bank has zero dimension");

  // Check the payload size before allocating so a corrupt header cannot
  // request an absurd buffer.
  const std::size_t remaining = in.remaining();
  if (n > remaining / 4) {
    fail(ErrorKind::format, "truncated file: " + std::to_string(n) + " labels declared but only " +
                                std::to_string(remaining) + " payload bytes follow byte offset " +
                                std::to_string(kHeaderBytes));
  }
  const std::size_t label_bytes = n * 4;
  const std::size_t feature_room = remaining - label_bytes;
  if (d > feature_room / 4 / n) {
    fail(ErrorKind::format, "truncated file: " + std::to_string(n) + "x" + std::to_string(d) +
                                " features declared but only " + std::to_string(feature_room) +
                                " bytes follow byte offset " + std::to_string(kHeaderBytes + label_bytes));
  }
  const std::size_t feature_bytes = n * d * 4;
  if (feature_room > feature_bytes) {
    fail(ErrorKind::format, "trailing data: " + std::to_string(feature_room - feature_bytes) +
                                " unexpected bytes at byte offset " +
                                std::to_string(kHeaderBytes + label_bytes + feature_bytes));
  }

  Labels labels(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t at = in.offset();
    labels[i] = in.u32("label");
    if (labels[i] >= num_classes) {
      fail(ErrorKind::validation, "row " + std::to_string(i) + " (byte offset " + std::to_string(at) +
                                      "): label " + std::to_string(labels[i]) + " >= num_classes " +
                                      std::to_string(num_classes));
    }
  }
  MatrixF features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t k = 0; k < d; ++k) {
      const std::size_t at = in.offset();
      const float v = in.f32("feature");
      if (!std::isfinite(v)) {
        fail(ErrorKind::validation, "row " + std::to_string(i) + ", column " + std::to_string(k) +
                                        " (byte offset " + std::to_string(at) + "): non-finite feature value");
      }
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return FeatureBank::create(std::move(features), std::move(labels), num_classes, raw_flag == 1);
}

void save_bank(const FeatureBank& bank, const std::filesystem::path& path) {
  ByteWriter out;
  out.reserve(kHeaderBytes + bank.size() * 4 * (1 + bank.dim()));
  out.bytes(kMagic.data(), kMagic.size());
  out.u32(kVersion);
  out.u64(bank.size());
  out.u64(bank.dim());
  out.u64(bank.num_classes());
  out.u8(bank.raw() ? 1 : 0);
  for (Label l : bank.labels()) out.u32(l);
  const MatrixF& f = bank.features();
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index k = 0; k < f.cols(); ++k) out.f32(f(i, k));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(out.data().data()), static_cast<std::streamsize>(out.data().size()));
  if (!file) fail(ErrorKind::io, "write failure on '" + path.string() + "'");
}

FeatureBank load_bank_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "' for reading");

  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::format, "empty CSV file '" + path.string() + "'");
  std::size_t d = 0;
  {
    std::istringstream header(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(header, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      const std::string expected = col == 0 ? "label" : "f" + std::to_string(col - 1);
      if (cell != expected) {
        fail(ErrorKind::format, "CSV header column " + std::to_string(col) + " is '" + cell + "', expected '" +
                                    expected + "'");
      }
      ++col;
    }
    if (col < 2) fail(ErrorKind::format, "CSV header must have a label and at least one feature column");
    d = col - 1;
  }

  std::vector<float> values;
  Labels labels;
  std::size_t max_label = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      if (col == 0) {
        const unsigned long long label = std::strtoull(cell.c_str(), &end, 10);
        if (cell.empty() || *end != '\0' || cell.front() == '-') {
          fail(ErrorKind::format, "CSV row " + std::to_string(row) + ": bad label '" + cell + "'");
        }
        if (label > UINT32_MAX) fail(ErrorKind::format, "CSV row " + std::to_string(row) + ": label too large");
        labels.push_back(static_cast<Label>(label));
        max_label = std::max<std::size_t>(max_label, label);
      } else {
        const float v = std::strtof(cell.c_str(), &end);
        if (cell.empty() || *end != '\0') {
          fail(ErrorKind::format, "CSV row " + std::to_string(row) + ", column " + std::to_string(col - 1) +
                                      ": bad number '" + cell + "'");
        }
        values.push_back(v);
      }
      ++col;
    }
    if (col != d + 1) {
      fail(ErrorKind::format, "CSV row " + std::to_string(row) + " has " + std::to_string(col) + " cells, expected " +
                                  std::to_string(d + 1));
    }
    ++row;
  }
  if (row == 0) fail(ErrorKind::validation, "feature bank has no samples");

  MatrixF features = Eigen::Map<MatrixF>(values.data(), static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(d));
  const bool raw = features.allFinite() && (features.array() >= 0.0f).all();
  return FeatureBank::create(std::move(features), std::move(labels), max_label + 1, raw);
}

FeatureBank load_bank_any(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? load_bank_csv(path) : load_bank(path);
}

FeatureBank concat_banks(const FeatureBank& a, const FeatureBank& b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::validation, "concat: sample counts differ (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
  }
  if (a.num_classes() != b.num_classes()) {
    fail(ErrorKind::validation, "concat: class counts differ (" + std::to_string(a.num_classes()) + " vs " +
                                    std::to_string(b.num_classes()) + ")");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.labels()[i] != b.labels()[i]) {
      fail(ErrorKind::validation, "concat: label sequences differ at row " + std::to_string(i));
    }
  }
  MatrixF joined(a.features().rows(), a.features().cols() + b.features().cols());
  joined << a.features(), b.features();
  return FeatureBank::create(std::move(joined), a.labels(), a.num_classes(), a.raw() && b.raw());
}

FeatureBank synth_bank(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto d = static_cast<Eigen::Index>(spec.d);

  Matrix templates(static_cast<Eigen::Index>(spec.w_classes), d);
  for (Eigen::Index c = 0; c < templates.rows(); ++c) {
    for (Eigen::Index k = 0; k < d; ++k) templates(c, k) = spec.center_scale * rng.normal();
  }

  const std::size_t n = spec.w_classes * spec.per_class;
  MatrixF features(static_cast<Eigen::Index>(n), d);
  Labels labels(n);
  std::size_t row = 0;
  for (std::size_t c = 0; c < spec.w_classes; ++c) {
    for (std::size_t j = 0; j < spec.per_class; ++j, ++row) {
      labels[row] = static_cast<Label>(c);
      for (Eigen::Index k = 0; k < d; ++k) {
        const double center = templates(static_cast<Eigen::Index>(c), k);
        double v = 0.0;
        if (spec.skew_mode == SkewMode::gaussian) {
          v = center + spec.noise_scale * rng.normal();
        } else {
          v = std::exp(center) * std::pow(rng.exponential(), spec.noise_scale);
        }
        features(static_cast<Eigen::Index>(row), k) = static_cast<float>(v);
      }
    }
  }
  return FeatureBank::create(std::move(features), std::move(labels), spec.w_classes,
                             spec.skew_mode == SkewMode::exponential);
}

}  // namespace ptmap
