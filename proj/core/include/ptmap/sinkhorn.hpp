#pragma once

#include "ptmap/types.hpp"

namespace ptmap {

struct SinkhornConfig {
  /// Multiplies the cost inside the Gibbs kernel exp(-lambda * L). Larger
  /// values give sharper (lower entropy) plans.
  double lambda = 10.0;
  /// Maximum allowed marginal violation.
  double tol = 1e-6;
  int max_iters = 1000;
  /// Force the log-sum-exp solver. The linear solver falls back to it on its
  /// own when the kernel or a scaling vector over/underflows.
  bool log_domain = false;

  void validate() const;
};

/// Row and column marginals of the transport polytope.
struct Marginals {
  Vector p;
  Vector q;

  /// p = 1 for every row; q = rows / cols for every column.
  static Marginals balanced(Eigen::Index rows, Eigen::Index cols);

  /// p = 1 for every row; q = prior rescaled to sum to `rows`.
  static Marginals from_prior(Eigen::Index rows, const Vector& prior);
};

struct TransportPlan {
  Matrix m;
  /// Final scalings: m = diag(u) * exp(-lambda * L) * diag(v).
  Vector u;
  Vector v;
  bool converged = false;
  bool log_domain = false;
  int iterations = 0;
  /// max(|m 1 - p|_inf, |m^T 1 - q|_inf)
  double residual = 0.0;
};

/// Pairwise squared Euclidean distances, rows of `points` against rows of
/// `centers`.
Matrix squared_distances(const Matrix& points, const Matrix& centers);

/// Entropy-regularized transport by alternating row/column scaling.
TransportPlan sinkhorn(const Matrix& cost, const Marginals& marginals, const SinkhornConfig& cfg);

/// H(M) = -sum M_ij log M_ij with 0 log 0 = 0.
double plan_entropy(const Matrix& m);
inline double plan_entropy(const TransportPlan& plan) { return plan_entropy(plan.m); }

/// <M, L> - H(M) / lambda, the quantity minimized over the polytope.
double transport_objective(const Matrix& cost, const Matrix& m, double lambda);

}  // namespace ptmap
