#include "doctest.h"

#include "oracles.hpp"

#include "ptmap/error.hpp"
#include "ptmap/feature_bank.hpp"
#include "ptmap/preprocess.hpp"
#include "ptmap/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace ptmap;
using doctest::Approx;

TEST_SUITE("preprocess") {
  TEST_CASE("square root branch") {
    const Vector out = power_transform(Vector{{1.0, 4.0}}, {0.5, 1e-300});
    CHECK(out[0] == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(out[1] == Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  }

  TEST_CASE("log branch") {
    const double eps = 1e-6;
    const double e = std::numbers::e;
    const Vector out = power_transform(Vector{{e - eps, e * e - eps}}, {0.0, eps});
    CHECK(out[0] == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-9));
    CHECK(out[1] == Approx(2.0 / std::sqrt(5.0)).epsilon(1e-9));
  }

  TEST_CASE("beta = 1 is plain normalization") {
    const Vector out = power_transform(Vector{{3.0, 4.0}}, {1.0, 1e-300});
    CHECK(out[0] == Approx(0.6).epsilon(1e-12));
    CHECK(out[1] == Approx(0.8).epsilon(1e-12));
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(power_transform(Vector{{1.0, -0.5}}, {}), Error);
    const double eps = 1e-6;
    // log(1) = 0 everywhere -> zero norm.
    CHECK_THROWS_AS(power_transform(Vector{{1.0 - eps, 1.0 - eps}}, {0.0, eps}), Error);
    CHECK_THROWS_AS(PowerParams({0.5, 0.0}).validate(), Error);
  }

  TEST_CASE("unit norm, permutation equivariance, monotonicity") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
      Vector v(16);
      for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = rng.exponential() * (trial % 3 == 0 ? 10.0 : 1.0);
      for (double beta : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        const Vector out = power_transform(v, {beta, 1e-6});
        REQUIRE(std::abs(out.norm() - 1.0) <= 1e-12);

        Vector perm = v.reverse();
        const Vector out_perm = power_transform(perm, {beta, 1e-6});
        REQUIRE((out_perm - out.reverse()).cwiseAbs().maxCoeff() <= 1e-15);

        if (beta > 0.0) {
          for (Eigen::Index i = 0; i < v.size(); ++i) {
            for (Eigen::Index j = 0; j < v.size(); ++j) {
              if (v[i] < v[j]) REQUIRE(out[i] < out[j]);
            }
          }
        }
      }
    }
  }

  TEST_CASE("trans_mean_sub centers each set separately") {
    Matrix support(2, 2);
    support << 1.0, 3.0, 1.0, 3.0;
    Matrix query(2, 2);
    query << 2.0, 0.0, 0.0, 2.0;
    const CenteredPair out = trans_mean_sub(support, query);
    CHECK(out.zero_rows == 2);
    CHECK(out.support.isZero(0.0));
    const double h = std::sqrt(0.5);
    CHECK(out.query(0, 0) == Approx(h));
    CHECK(out.query(0, 1) == Approx(-h));
    CHECK(out.query(1, 0) == Approx(-h));
    CHECK(out.query(1, 1) == Approx(h));
  }

  TEST_CASE("trans_mean_sub row norms and column means") {
    Rng rng(9);
    Matrix support(10, 5);
    Matrix query(40, 5);
    for (Eigen::Index i = 0; i < support.size(); ++i) support.data()[i] = rng.normal() + 3.0;
    for (Eigen::Index i = 0; i < query.size(); ++i) query.data()[i] = rng.normal() - 1.0;

    const Matrix centered_s = support.rowwise() - support.colwise().mean();
    const Matrix centered_q = query.rowwise() - query.colwise().mean();
    CHECK(centered_s.colwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(centered_q.colwise().sum().cwiseAbs().maxCoeff() <= 1e-10);

    const CenteredPair out = trans_mean_sub(support, query);
    CHECK(out.zero_rows == 0);
    for (Eigen::Index i = 0; i < out.support.rows(); ++i) CHECK(std::abs(out.support.row(i).norm() - 1.0) <= 1e-12);
    for (Eigen::Index i = 0; i < out.query.rows(); ++i) CHECK(std::abs(out.query.row(i).norm() - 1.0) <= 1e-12);
    // Same directions as the centered rows.
    CHECK((out.query.row(3) - centered_q.row(3).normalized()).norm() <= 1e-12);

    CHECK_THROWS_AS(trans_mean_sub(support, Matrix(3, 4)), Error);
  }

  TEST_CASE("shared mean mode pools both sets") {
    Matrix support(1, 2);
    support << 4.0, 0.0;
    Matrix query(1, 2);
    query << 0.0, 0.0;
    const CenteredPair out = trans_mean_sub(support, query, true);
    CHECK(out.support(0, 0) == Approx(1.0));
    CHECK(out.query(0, 0) == Approx(-1.0));
  }

  TEST_CASE("sample skewness") {
    const std::vector<double> sym{-1.0, 0.0, 1.0};
    CHECK(sample_skewness(sym) == Approx(0.0));
    const std::vector<double> right{0.0, 0.0, 3.0};
    CHECK(sample_skewness(right) > 0.0);
    CHECK(sample_skewness(right) == Approx(oracle::skewness(right)).epsilon(1e-12));
    const std::vector<double> flat{2.0, 2.0, 2.0};
    CHECK_THROWS_AS(sample_skewness(flat), Error);
    const std::vector<double> short_{1.0, 2.0};
    CHECK_THROWS_AS(sample_skewness(short_), Error);
  }

  TEST_CASE("power transform reduces the skew of exponential draws") {
    // Exp(1) has skewness 2; sqrt(Exp(1)) is Weibull(k=2) with skewness ~0.63.
    Rng rng(21);
    std::vector<double> raw(10000);
    std::vector<double> transformed(10000);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      raw[i] = rng.exponential();
      transformed[i] = std::pow(raw[i] + 1e-6, 0.5);
    }
    const double before = sample_skewness(raw);
    const double after = sample_skewness(transformed);
    CHECK(before == Approx(2.0).epsilon(0.1));
    CHECK(before - after > 0.0);
    CHECK(after == Approx(0.631).epsilon(0.1));
  }

  TEST_CASE("per-feature skew drops after row-wise PT on a synthetic bank") {
    const FeatureBank bank = synth_bank({1, 10000, 64, 1.0, 1.0, SkewMode::exponential, 3});
    const Matrix raw = bank.features().cast<double>();
    const Vector before = column_skewness(raw);
    const Vector after = column_skewness(power_transform_rows(raw, {0.5, 1e-6}));
    CHECK(after.cwiseAbs().mean() < before.cwiseAbs().mean());
  }
}
