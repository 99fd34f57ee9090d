#pragma once

#include "ptmap/types.hpp"

#include <cstddef>
#include <span>

namespace ptmap {

struct PowerParams {
  double beta = 0.5;
  double epsilon = 1e-6;

  void validate() const;
};

/// Componentwise (v + eps)^beta, or log(v + eps) when beta == 0, followed by
/// projection onto the unit L2 sphere. v must be nonnegative.
Vector power_transform(const Eigen::Ref<const Vector>& v, const PowerParams& params);

/// Row-wise power_transform of a sample matrix.
Matrix power_transform_rows(const Matrix& rows, const PowerParams& params);

struct CenteredPair {
  Matrix support;
  Matrix query;
  /// Rows that were exactly zero after centering; they are left as zeros.
  std::size_t zero_rows = 0;
};

/// Subtract the support mean from support rows and the query mean from
/// query rows, then project every row to unit norm. With shared_mean the
/// mean over all rows of both sets is used for both.
CenteredPair trans_mean_sub(const Matrix& support, const Matrix& query, bool shared_mean = false);

/// Biased standardized third moment m3 / m2^{3/2}. Needs >= 3 samples and
/// nonzero variance.
double sample_skewness(std::span<const double> samples);

/// Per-column sample skewness of a sample matrix.
Vector column_skewness(const Matrix& rows);

}  // namespace ptmap
