#pragma once

#include "ptmap/feature_bank.hpp"
#include "ptmap/types.hpp"

#include <cstdint>
#include <vector>

namespace ptmap {

/// w-way s-shot episode layout. q_per_class holds either one count shared
/// by every class, or one count per episode class (imbalanced queries).
struct EpisodeSpec {
  std::size_t w = 5;
  std::size_t s = 1;
  std::vector<std::size_t> q_per_class = {15};
  std::uint64_t seed = 0;

  static EpisodeSpec balanced(std::size_t w, std::size_t s, std::size_t q, std::uint64_t seed = 0);
  static EpisodeSpec imbalanced(std::size_t s, std::vector<std::size_t> q, std::uint64_t seed = 0);

  std::size_t queries_for(std::size_t episode_class) const;
  std::size_t total_queries() const;
  std::size_t max_queries() const;
  void validate() const;
};

/// What a classifier is allowed to see: support rows with labels, and
/// unlabelled query rows. Query labels are deliberately absent.
struct EpisodeView {
  const Matrix& support;
  const Labels& support_labels;
  const Matrix& query;
  std::size_t ways;
};

struct Episode {
  Matrix support_feats;
  Labels support_labels;
  Matrix query_feats;
  /// Held out; only used for scoring.
  Labels query_labels;
  /// Episode class -> bank class.
  std::vector<Label> class_map;
  /// Bank row indices, for provenance and disjointness checks.
  std::vector<std::uint32_t> support_rows;
  std::vector<std::uint32_t> query_rows;

  std::size_t ways() const noexcept { return class_map.size(); }
  EpisodeView view() const { return {support_feats, support_labels, query_feats, ways()}; }
};

/// Per-step solver diagnostics recorded by the transductive classifiers.
struct StepTrace {
  int sinkhorn_iterations = 0;
  double sinkhorn_residual = 0.0;
  bool converged = true;
  bool log_domain = false;
};

struct Prediction {
  Labels labels;
  /// One row per query, each summing to 1.
  Matrix probabilities;
  std::vector<StepTrace> trajectory;
  std::size_t nonconverged = 0;
};

/// Classes drawn uniformly without replacement; then within each class
/// s + q_c rows drawn uniformly without replacement, the first s being the
/// support. Queries are grouped by episode class. Deterministic in spec.seed.
Episode sample_episode(const FeatureBank& bank, const EpisodeSpec& spec);

double episode_accuracy(const Prediction& pred, const Episode& episode);
double accuracy(const Labels& predicted, const Labels& truth);

/// Row-wise argmax, ties to the lowest column.
Labels argmax_rows(const Matrix& m);

/// One-hot probability rows for hard label decisions.
Matrix one_hot(const Labels& labels, std::size_t ways);

}  // namespace ptmap
