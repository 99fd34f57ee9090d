#include "ptmap/sinkhorn.hpp"

#include "ptmap/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ptmap {

void SinkhornConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::config, "lambda must be finite and > 0");
  if (!(tol > 0.0)) fail(ErrorKind::config, "sinkhorn tolerance must be > 0");
  if (max_iters < 1) fail(ErrorKind::config, "sinkhorn max_iters must be >= 1");
}

Marginals Marginals::balanced(Eigen::Index rows, Eigen::Index cols) {
  return {Vector::Ones(rows), Vector::Constant(cols, static_cast<double>(rows) / static_cast<double>(cols))};
}

Marginals Marginals::from_prior(Eigen::Index rows, const Vector& prior) {
  for (Eigen::Index j = 0; j < prior.size(); ++j) {
    if (!(prior[j] > 0.0) || !std::isfinite(prior[j])) {
      fail(ErrorKind::config, "class prior entry " + std::to_string(j) + " must be finite and > 0");
    }
  }
  return {Vector::Ones(rows), prior * (static_cast<double>(rows) / prior.sum())};
}

Matrix squared_distances(const Matrix& points, const Matrix& centers) {
  Matrix out(points.rows(), centers.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      out(i, j) = (points.row(i) - centers.row(j)).squaredNorm();
    }
  }
  return out;
}

namespace {

double marginal_residual(const Matrix& m, const Marginals& marg) {
  const double rows = (m.rowwise().sum() - marg.p).cwiseAbs().maxCoeff();
  const double cols = (m.colwise().sum().transpose() - marg.q).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

double log_sum_exp(const Vector& x) {
  const double top = x.maxCoeff();
  return top + std::log((x.array() - top).exp().sum());
}

bool usable(const Vector& x) {
  return x.allFinite() && x.minCoeff() >= std::numeric_limits<double>::min();
}

// Returns false when the linear-domain iteration cannot be trusted.
bool solve_linear(const Matrix& cost, const Marginals& marg, const SinkhornConfig& cfg, TransportPlan& plan) {
  const Matrix kernel = (-cfg.lambda * cost.array()).exp().matrix();
  if (kernel.minCoeff() < std::numeric_limits<double>::min()) return false;

  Vector u = Vector::Ones(cost.rows());
  Vector v = Vector::Ones(cost.cols());
  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    u = marg.p.cwiseQuotient(kernel * v);
    v = marg.q.cwiseQuotient(kernel.transpose() * u);
    if (!usable(u) || !usable(v)) return false;
    // Columns match exactly after the v update; rows carry the violation.
    const double row_err = (u.cwiseProduct(kernel * v) - marg.p).cwiseAbs().maxCoeff();
    if (row_err <= cfg.tol) break;
  }
  plan.m = u.asDiagonal() * kernel * v.asDiagonal();
  plan.u = std::move(u);
  plan.v = std::move(v);
  plan.iterations = std::min(it, cfg.max_iters);
  plan.log_domain = false;
  return plan.m.allFinite();
}

void solve_log(const Matrix& cost, const Marginals& marg, const SinkhornConfig& cfg, TransportPlan& plan) {
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  const Matrix log_kernel = -cfg.lambda * cost;
  const Vector log_p = marg.p.array().log();
  const Vector log_q = marg.q.array().log();

  Vector f = Vector::Zero(rows);
  Vector g = Vector::Zero(cols);
  auto plan_from = [&](const Vector& ff, const Vector& gg) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = std::exp(log_kernel(i, j) + ff[i] + gg[j]);
    }
    return m;
  };

  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    for (Eigen::Index i = 0; i < rows; ++i) f[i] = log_p[i] - log_sum_exp(log_kernel.row(i).transpose() + g);
    for (Eigen::Index j = 0; j < cols; ++j) g[j] = log_q[j] - log_sum_exp(log_kernel.col(j) + f);
    if (!f.allFinite() || !g.allFinite()) {
      fail(ErrorKind::numerical, "sinkhorn: non-finite potentials in log domain at iteration " + std::to_string(it));
    }
    double row_err = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < cols; ++j) s += std::exp(log_kernel(i, j) + f[i] + g[j]);
      row_err = std::max(row_err, std::abs(s - marg.p[i]));
    }
    if (row_err <= cfg.tol) break;
  }
  plan.m = plan_from(f, g);
  plan.u = f.array().exp();
  plan.v = g.array().exp();
  plan.iterations = std::min(it, cfg.max_iters);
  plan.log_domain = true;
}

}  // namespace

TransportPlan sinkhorn(const Matrix& cost, const Marginals& marginals, const SinkhornConfig& cfg) {
  cfg.validate();
  if (cost.rows() == 0 || cost.cols() == 0) fail(ErrorKind::validation, "sinkhorn: empty cost matrix");
  if (marginals.p.size() != cost.rows() || marginals.q.size() != cost.cols()) {
    fail(ErrorKind::validation, "sinkhorn: marginal lengths do not match the cost matrix");
  }
  if (!cost.allFinite() || cost.minCoeff() < 0.0) {
    fail(ErrorKind::validation, "sinkhorn: cost entries must be finite and nonnegative");
  }
  if (!(marginals.p.minCoeff() > 0.0) || !(marginals.q.minCoeff() > 0.0) || !marginals.p.allFinite() ||
      !marginals.q.allFinite()) {
    fail(ErrorKind::validation, "sinkhorn: marginal entries must be finite and > 0");
  }
  const double sp = marginals.p.sum();
  const double sq = marginals.q.sum();
  if (std::abs(sp - sq) > 1e-9 * std::max(1.0, sp)) {
    fail(ErrorKind::validation, "sinkhorn: marginal sums differ (" + std::to_string(sp) + " vs " +
                                    std::to_string(sq) + ")");
  }

  TransportPlan plan;
  if (cfg.log_domain || !solve_linear(cost, marginals, cfg, plan)) solve_log(cost, marginals, cfg, plan);
  plan.residual = marginal_residual(plan.m, marginals);
  plan.converged = plan.residual <= cfg.tol;
  return plan;
}

double plan_entropy(const Matrix& m) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double x = m(i, j);
      if (x > 0.0) h -= x * std::log(x);
    }
  }
  return h;
}

double transport_objective(const Matrix& cost, const Matrix& m, double lambda) {
  return cost.cwiseProduct(m).sum() - plan_entropy(m) / lambda;
}

}  // namespace ptmap
