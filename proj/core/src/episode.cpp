#include "ptmap/episode.hpp"

#include "ptmap/error.hpp"
#include "ptmap/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace ptmap {

EpisodeSpec EpisodeSpec::balanced(std::size_t w, std::size_t s, std::size_t q, std::uint64_t seed) {
  return {w, s, {q}, seed};
}

EpisodeSpec EpisodeSpec::imbalanced(std::size_t s, std::vector<std::size_t> q, std::uint64_t seed) {
  const std::size_t w = q.size();
  return {w, s, std::move(q), seed};
}

std::size_t EpisodeSpec::queries_for(std::size_t episode_class) const {
  return q_per_class.size() == 1 ? q_per_class.front() : q_per_class.at(episode_class);
}

std::size_t EpisodeSpec::total_queries() const {
  std::size_t total = 0;
  for (std::size_t c = 0; c < w; ++c) total += queries_for(c);
  return total;
}

std::size_t EpisodeSpec::max_queries() const {
  return q_per_class.empty() ? 0 : *std::max_element(q_per_class.begin(), q_per_class.end());
}

void EpisodeSpec::validate() const {
  if (w < 2) fail(ErrorKind::config, "episode: w must be >= 2");
  if (s < 1) fail(ErrorKind::config, "episode: s must be >= 1");
  if (q_per_class.size() != 1 && q_per_class.size() != w) {
    fail(ErrorKind::config, "episode: query count list has " + std::to_string(q_per_class.size()) +
                                " entries, expected 1 or w=" + std::to_string(w));
  }
  if (total_queries() == 0) fail(ErrorKind::config, "episode: at least one query is required");
}

Episode sample_episode(const FeatureBank& bank, const EpisodeSpec& spec) {
  spec.validate();
  if (bank.num_classes() < spec.w) {
    fail(ErrorKind::validation, "episode: bank has " + std::to_string(bank.num_classes()) + " classes, need " +
                                    std::to_string(spec.w));
  }
  Rng rng(spec.seed);

  std::vector<std::uint32_t> classes(bank.num_classes());
  std::iota(classes.begin(), classes.end(), 0u);
  rng.partial_shuffle(classes, spec.w);

  const auto d = static_cast<Eigen::Index>(bank.dim());
  Episode ep;
  ep.class_map.assign(classes.begin(), classes.begin() + static_cast<std::ptrdiff_t>(spec.w));
  ep.support_feats.resize(static_cast<Eigen::Index>(spec.w * spec.s), d);
  ep.query_feats.resize(static_cast<Eigen::Index>(spec.total_queries()), d);

  std::vector<std::uint32_t> pool;
  Eigen::Index srow = 0;
  Eigen::Index qrow = 0;
  for (std::size_t c = 0; c < spec.w; ++c) {
    const auto rows = bank.class_rows(ep.class_map[c]);
    const std::size_t need = spec.s + spec.queries_for(c);
    if (rows.size() < need) {
      fail(ErrorKind::validation, "episode: bank class " + std::to_string(ep.class_map[c]) + " has " +
                                      std::to_string(rows.size()) + " samples, need " + std::to_string(need));
    }
    pool.assign(rows.begin(), rows.end());
    rng.partial_shuffle(pool, need);
    for (std::size_t k = 0; k < need; ++k) {
      const auto src = static_cast<Eigen::Index>(pool[k]);
      if (k < spec.s) {
        ep.support_feats.row(srow++) = bank.features().row(src).cast<double>();
        ep.support_labels.push_back(static_cast<Label>(c));
        ep.support_rows.push_back(pool[k]);
      } else {
        ep.query_feats.row(qrow++) = bank.features().row(src).cast<double>();
        ep.query_labels.push_back(static_cast<Label>(c));
        ep.query_rows.push_back(pool[k]);
      }
    }
  }
  return ep;
}

double accuracy(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) {
    fail(ErrorKind::validation, "accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                                    std::to_string(truth.size()) + " queries");
  }
  if (truth.empty()) fail(ErrorKind::validation, "accuracy: no queries");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double episode_accuracy(const Prediction& pred, const Episode& episode) {
  return accuracy(pred.labels, episode.query_labels);
}

Labels argmax_rows(const Matrix& m) {
  Labels out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      if (m(i, j) > m(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<Label>(best);
  }
  return out;
}

Matrix one_hot(const Labels& labels, std::size_t ways) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(ways));
  for (std::size_t i = 0; i < labels.size(); ++i) out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return out;
}

}  // namespace ptmap
