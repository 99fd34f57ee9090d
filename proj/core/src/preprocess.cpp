#include "ptmap/preprocess.hpp"

#include "ptmap/error.hpp"

#include <cmath>
#include <string>

namespace ptmap {

void PowerParams::validate() const {
  if (!std::isfinite(beta)) fail(ErrorKind::config, "beta must be finite");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorKind::config, "epsilon must be finite and > 0");
}

Vector power_transform(const Eigen::Ref<const Vector>& v, const PowerParams& params) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!(v[k] >= 0.0)) {
      fail(ErrorKind::validation, "power transform: component " + std::to_string(k) + " is negative or NaN");
    }
  }
  const Eigen::ArrayXd shifted = v.array() + params.epsilon;
  Vector out = params.beta == 0.0 ? Vector(shifted.log()) : Vector(shifted.pow(params.beta));
  const double norm = out.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorKind::numerical, "power transform: transformed vector has zero or non-finite norm");
  }
  out /= norm;
  return out;
}

Matrix power_transform_rows(const Matrix& rows, const PowerParams& params) {
  Matrix out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = power_transform(rows.row(i).transpose(), params).transpose();
  }
  return out;
}

namespace {

// Rows shorter than this after centering are treated as degenerate.
constexpr double kZeroRowNorm = 1e-12;

std::size_t normalize_rows(Matrix& m) {
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > kZeroRowNorm) {
      m.row(i) /= norm;
    } else {
      m.row(i).setZero();
      ++zeros;
    }
  }
  return zeros;
}

}  // namespace

CenteredPair trans_mean_sub(const Matrix& support, const Matrix& query, bool shared_mean) {
  if (support.rows() == 0 || query.rows() == 0) fail(ErrorKind::validation, "trans_mean_sub: empty input");
  if (support.cols() != query.cols()) {
    fail(ErrorKind::validation, "trans_mean_sub: dimension mismatch (" + std::to_string(support.cols()) + " vs " +
                                    std::to_string(query.cols()) + ")");
  }
  RowVector support_mean = support.colwise().mean();
  RowVector query_mean = query.colwise().mean();
  if (shared_mean) {
    const double ns = static_cast<double>(support.rows());
    const double nq = static_cast<double>(query.rows());
    const RowVector all = (support_mean * ns + query_mean * nq) / (ns + nq);
    support_mean = all;
    query_mean = all;
  }
  CenteredPair out{support.rowwise() - support_mean, query.rowwise() - query_mean, 0};
  out.zero_rows = normalize_rows(out.support) + normalize_rows(out.query);
  return out;
}

double sample_skewness(std::span<const double> samples) {
  if (samples.size() < 3) fail(ErrorKind::validation, "skewness needs at least 3 samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : samples) {
    const double dx = x - mean;
    m2 += dx * dx;
    m3 += dx * dx * dx;
  }
  m2 /= n;
  m3 /= n;
  if (!(m2 > 0.0)) fail(ErrorKind::validation, "skewness undefined for zero variance");
  return m3 / std::pow(m2, 1.5);
}

Vector column_skewness(const Matrix& rows) {
  Vector out(rows.cols());
  Vector column(rows.rows());
  for (Eigen::Index k = 0; k < rows.cols(); ++k) {
    column = rows.col(k);
    out[k] = sample_skewness(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
  }
  return out;
}

}  // namespace ptmap
