#pragma once

#include "ptmap/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ptmap {

/// A labelled matrix of pre-extracted feature vectors, one row per sample.
///
/// Immutable after construction; all invariants are checked by create():
/// labels lie in [0, num_classes), every class has at least one sample, all
/// values are finite, and a raw bank holds only nonnegative values (features
/// taken after a ReLU). Payload is kept in single precision, which is also
/// the on-disk precision, so save/load round-trips bit-exactly.
class FeatureBank {
 public:
  static FeatureBank create(MatrixF features, Labels labels, std::size_t num_classes, bool raw);

  std::size_t size() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  std::size_t num_classes() const noexcept { return class_rows_.size(); }
  bool raw() const noexcept { return raw_; }

  const MatrixF& features() const noexcept { return features_; }
  const Labels& labels() const noexcept { return labels_; }

  /// Row indices of class c, ascending.
  std::span<const std::uint32_t> class_rows(std::size_t c) const { return class_rows_.at(c); }

  friend bool operator==(const FeatureBank& a, const FeatureBank& b);

 private:
  FeatureBank() = default;

  MatrixF features_;
  Labels labels_;
  std::vector<std::vector<std::uint32_t>> class_rows_;
  bool raw_ = false;
};

enum class SkewMode { gaussian, exponential };

/// Parameters of the synthetic class-conditional generator.
///
/// gaussian: x = center_scale * z_c + noise_scale * n, with z_c, n ~ N(0, I).
///   Values may be negative, so the bank is not raw.
/// exponential: x = exp(center_scale * z_c) * E^noise_scale, E ~ Exp(1)
///   per component. Nonnegative and right-skewed (Weibull with shape
///   1/noise_scale; noise_scale = 1 is exactly exponential per class). As
///   noise_scale -> 0 every sample collapses onto its class template.
struct SynthSpec {
  std::size_t w_classes = 5;
  std::size_t per_class = 600;
  std::size_t d = 64;
  double center_scale = 1.0;
  double noise_scale = 1.0;
  SkewMode skew_mode = SkewMode::exponential;
  std::uint64_t seed = 1;

  void validate() const;
};

FeatureBank load_bank(const std::filesystem::path& path);
void save_bank(const FeatureBank& bank, const std::filesystem::path& path);

/// CSV import: header `label,f0,...,f{d-1}`, one sample per line. The bank is
/// flagged raw when every value is nonnegative.
FeatureBank load_bank_csv(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" goes through the CSV reader, anything else
/// through the binary reader.
FeatureBank load_bank_any(const std::filesystem::path& path);

/// Side-by-side concatenation of two banks over the same samples. Row i of
/// the result is a's row i followed by b's row i.
FeatureBank concat_banks(const FeatureBank& a, const FeatureBank& b);

FeatureBank synth_bank(const SynthSpec& spec);

}  // namespace ptmap
