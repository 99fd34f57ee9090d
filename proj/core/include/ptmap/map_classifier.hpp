#pragma once

#include "ptmap/episode.hpp"
#include "ptmap/preprocess.hpp"
#include "ptmap/sinkhorn.hpp"
#include "ptmap/types.hpp"

#include <optional>

namespace ptmap {

/// Class centers, one row per class.
using Centers = Matrix;

/// Every knob of the pipeline: preprocessing, the iterative center
/// estimation, and its inner transport solver.
struct MapConfig {
  PowerParams power;
  bool use_power_transform = true;
  bool use_mean_sub = true;
  /// Subtract one mean computed over support and query rows together
  /// instead of each set's own mean.
  bool shared_mean = false;

  /// Inertia of the center update, in (0, 1].
  double alpha = 0.4;
  int n_steps = 30;
  SinkhornConfig sinkhorn;
  /// Expected query count per class, any positive scale. Balanced when empty.
  std::optional<Vector> class_prior;

  /// Tuned values: alpha 0.4 / 30 steps for 1-shot, alpha 0.2 / 20 steps
  /// otherwise; beta 0.5 and lambda 10 for both.
  static MapConfig defaults_for_shots(std::size_t shots);

  void validate() const;
};

/// Mean of each class's support rows.
Centers init_centers(const Matrix& support, const Labels& labels, std::size_t ways);

/// Weighted mean of queries (weights = plan column) and supports (weight 1
/// for their own class).
Centers reestimate_centers(const Matrix& plan, const Matrix& query, const Matrix& support, const Labels& labels);

/// c + alpha * (target - c)
Centers update_centers(const Centers& current, const Centers& target, double alpha);

/// Iterative transductive center estimation. Expects an already
/// preprocessed episode. Runs exactly cfg.n_steps rounds of
/// {cost, transport plan, re-estimate, inertial update} and labels each
/// query by the argmax of the last plan's row.
Prediction classify_map(const EpisodeView& episode, const MapConfig& cfg);

/// classify_map with the column marginal taken from `prior` (rescaled to
/// the query count).
Prediction classify_map_imbalanced(const EpisodeView& episode, const Vector& prior, MapConfig cfg);

}  // namespace ptmap
