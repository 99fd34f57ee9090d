#include "doctest.h"

#include "oracles.hpp"

#include "ptmap/error.hpp"
#include "ptmap/rng.hpp"
#include "ptmap/sinkhorn.hpp"

#include <cmath>

using namespace ptmap;
using doctest::Approx;

namespace {

Matrix random_cost(Rng& rng, Eigen::Index rows, Eigen::Index cols, double hi = 4.0) {
  Matrix c(rows, cols);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = hi * rng.uniform();
  return c;
}

oracle::Grid to_grid(const Matrix& m) {
  oracle::Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  }
  return g;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_SUITE("sinkhorn") {
  TEST_CASE("constant cost gives the uniform plan") {
    const Matrix cost = Matrix::Constant(75, 5, 1.3);
    const TransportPlan plan = sinkhorn(cost, Marginals::balanced(75, 5), {});
    CHECK(plan.converged);
    CHECK((plan.m.array() - 0.2).abs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("2x2 plan matches the fixed-point oracle") {
    Matrix cost(2, 2);
    cost << 0.0, 1.0, 1.0, 0.0;
    SinkhornConfig cfg;
    cfg.lambda = 1.0;
    cfg.tol = 1e-13;
    const Marginals marg{Vector::Ones(2), Vector::Ones(2)};
    const TransportPlan plan = sinkhorn(cost, marg, cfg);
    const oracle::Grid ref = oracle::sinkhorn_fixed_point(to_grid(cost), {1, 1}, {1, 1}, 1.0);
    // Frozen from the oracle; equals 1 / (1 + e^-1) by symmetry.
    const double diag = 0.7310585786300049;
    CHECK(ref[0][0] == Approx(diag).epsilon(1e-12));
    CHECK(plan.m(0, 0) == Approx(diag).epsilon(1e-12));
    CHECK(plan.m(1, 1) == Approx(diag).epsilon(1e-12));
    CHECK(plan.m(0, 1) == Approx(1.0 - diag).epsilon(1e-12));
    CHECK(plan.m(0, 0) > plan.m(0, 1));
  }

  TEST_CASE("large lambda approaches the optimal assignment") {
    Rng rng(77);
    int tested = 0;
    while (tested < 20) {
      const Matrix cost = random_cost(rng, 3, 3);
      const oracle::Assignment best = oracle::best_assignment(to_grid(cost));
      if (best.runner_up - best.cost < 0.05) continue;
      ++tested;
      SinkhornConfig cfg;
      cfg.lambda = 2000.0;
      cfg.tol = 1e-10;
      cfg.max_iters = 10000;
      const TransportPlan plan = sinkhorn(cost, {Vector::Ones(3), Vector::Ones(3)}, cfg);
      CHECK(plan.log_domain);
      double tv = 0.0;
      for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        for (int j = 0; j < 3; ++j) {
          const double hard = static_cast<std::size_t>(j) == best.perm[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
          row += std::abs(plan.m(i, j) - hard);
        }
        tv = std::max(tv, 0.5 * row);
      }
      CHECK(tv <= 1e-3);
    }
  }

  TEST_CASE("entropy of uniform and one-hot plans") {
    const Matrix uniform = Matrix::Constant(75, 5, 0.2);
    CHECK(plan_entropy(uniform) == Approx(75.0 * std::log(5.0)).epsilon(1e-12));
    Matrix hot = Matrix::Zero(75, 5);
    for (int i = 0; i < 75; ++i) hot(i, i % 5) = 1.0;
    CHECK(plan_entropy(hot) == 0.0);
  }

  TEST_CASE("entropy bounds and marginal feasibility on random 75x5") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix cost = random_cost(rng, 75, 5);
      const Marginals marg = Marginals::balanced(75, 5);
      const TransportPlan plan = sinkhorn(cost, marg, {});
      REQUIRE(plan.converged);
      CHECK((plan.m.rowwise().sum() - marg.p).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK((plan.m.colwise().sum().transpose() - marg.q).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK(plan.m.minCoeff() > 0.0);
      const double h = plan_entropy(plan);
      CHECK(h >= 0.0);
      CHECK(h <= 75.0 * std::log(5.0) + 1e-6);
    }
  }

  TEST_CASE("plan factorizes as diag(u) exp(-lambda L) diag(v)") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix cost = random_cost(rng, 75, 5);
      SinkhornConfig cfg;
      const TransportPlan plan = sinkhorn(cost, Marginals::balanced(75, 5), cfg);
      const Matrix kernel = (-cfg.lambda * cost.array()).exp().matrix();
      const Matrix rebuilt = plan.u.asDiagonal() * kernel * plan.v.asDiagonal();
      CHECK(((rebuilt - plan.m).array() / plan.m.array()).abs().maxCoeff() <= 1e-8);
    }
  }

  TEST_CASE("small lambda flattens the rows") {
    Rng rng(3);
    const Matrix cost = random_cost(rng, 20, 4);
    double previous = 1.0;
    for (double lambda : {10.0, 1.0, 0.1, 0.01, 0.001}) {
      SinkhornConfig cfg;
      cfg.lambda = lambda;
      const TransportPlan plan = sinkhorn(cost, Marginals::balanced(20, 4), cfg);
      const double tv = 0.5 * (plan.m.array() - 0.25).abs().rowwise().sum().maxCoeff();
      CHECK(tv < previous);
      previous = tv;
    }
    CHECK(previous < 1e-3);
  }

  TEST_CASE("log and linear domains agree") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix cost = random_cost(rng, 30, 5);
      SinkhornConfig lin;
      lin.tol = 1e-12;
      SinkhornConfig log = lin;
      log.log_domain = true;
      const TransportPlan a = sinkhorn(cost, Marginals::balanced(30, 5), lin);
      const TransportPlan b = sinkhorn(cost, Marginals::balanced(30, 5), log);
      CHECK_FALSE(a.log_domain);
      CHECK(b.log_domain);
      CHECK((a.m - b.m).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }

  TEST_CASE("objective matches the independent oracle on small grids") {
    Rng rng(5);
    for (Eigen::Index rows = 1; rows <= 4; ++rows) {
      for (Eigen::Index cols = 1; cols <= 3; ++cols) {
        for (int trial = 0; trial < 5; ++trial) {
          const Matrix cost = random_cost(rng, rows, cols);
          Vector prior(cols);
          for (Eigen::Index j = 0; j < cols; ++j) prior[j] = 0.5 + rng.uniform();
          const Marginals marg = Marginals::from_prior(rows, prior);
          const double lambda = 0.5 + 5.0 * rng.uniform();
          SinkhornConfig cfg;
          cfg.lambda = lambda;
          cfg.tol = 1e-12;
          cfg.max_iters = 100000;
          const TransportPlan plan = sinkhorn(cost, marg, cfg);
          const oracle::Grid ref = oracle::sinkhorn_fixed_point(to_grid(cost), to_std(marg.p), to_std(marg.q), lambda);
          CHECK(std::abs(transport_objective(cost, plan.m, lambda) - oracle::objective(to_grid(cost), ref, lambda)) <=
                1e-6);
        }
      }
    }
  }

  TEST_CASE("kernel underflow switches to the log domain") {
    Matrix cost(2, 2);
    cost << 0.0, 4.0, 4.0, 0.0;
    SinkhornConfig cfg;
    cfg.lambda = 500.0;
    const TransportPlan plan = sinkhorn(cost + Matrix::Constant(2, 2, 2.0), {Vector::Ones(2), Vector::Ones(2)}, cfg);
    CHECK(plan.log_domain);
    CHECK(plan.converged);
    CHECK(plan.m(0, 0) == Approx(1.0));
  }

  TEST_CASE("input validation") {
    const Matrix cost = Matrix::Ones(3, 2);
    CHECK_THROWS_AS(sinkhorn(cost, {Vector::Ones(3), Vector::Ones(2)}, {}), Error);  // sums 3 vs 2
    CHECK_THROWS_AS(sinkhorn(cost, {Vector::Ones(2), Vector::Ones(2)}, {}), Error);  // wrong length
    Matrix bad = cost;
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(sinkhorn(bad, Marginals::balanced(3, 2), {}), Error);
    bad(0, 0) = NAN;
    CHECK_THROWS_AS(sinkhorn(bad, Marginals::balanced(3, 2), {}), Error);
    SinkhornConfig cfg;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(sinkhorn(cost, Marginals::balanced(3, 2), cfg), Error);
    CHECK_THROWS_AS(Marginals::from_prior(3, Vector{{1.0, 0.0}}), Error);
  }

  TEST_CASE("prior marginals are scale free") {
    const Marginals a = Marginals::from_prior(10, Vector{{1.0, 1.0}});
    const Marginals b = Marginals::from_prior(10, Vector{{10.0, 10.0}});
    CHECK((a.q - b.q).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.q.sum() == Approx(10.0));
  }
}
