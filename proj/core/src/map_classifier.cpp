#include "ptmap/map_classifier.hpp"

#include "ptmap/error.hpp"

#include <cmath>
#include <string>

namespace ptmap {

MapConfig MapConfig::defaults_for_shots(std::size_t shots) {
  MapConfig cfg;
  cfg.power.beta = 0.5;
  cfg.sinkhorn.lambda = 10.0;
  if (shots <= 1) {
    cfg.alpha = 0.4;
    cfg.n_steps = 30;
  } else {
    cfg.alpha = 0.2;
    cfg.n_steps = 20;
  }
  return cfg;
}

void MapConfig::validate() const {
  power.validate();
  sinkhorn.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::config, "alpha must lie in (0, 1]");
  if (n_steps < 1) fail(ErrorKind::config, "n_steps must be >= 1");
  if (class_prior) {
    for (Eigen::Index j = 0; j < class_prior->size(); ++j) {
      if (!((*class_prior)[j] > 0.0) || !std::isfinite((*class_prior)[j])) {
        fail(ErrorKind::config, "class prior entry " + std::to_string(j) + " must be finite and > 0");
      }
    }
  }
}

Centers init_centers(const Matrix& support, const Labels& labels, std::size_t ways) {
  if (labels.size() != static_cast<std::size_t>(support.rows())) {
    fail(ErrorKind::validation, "init_centers: label count does not match support rows");
  }
  Centers centers = Centers::Zero(static_cast<Eigen::Index>(ways), support.cols());
  std::vector<std::size_t> counts(ways, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= ways) fail(ErrorKind::validation, "init_centers: support label out of range");
    centers.row(labels[i]) += support.row(static_cast<Eigen::Index>(i));
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < ways; ++c) {
    if (counts[c] == 0) fail(ErrorKind::validation, "init_centers: class " + std::to_string(c) + " has no support");
    centers.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
  }
  return centers;
}

Centers reestimate_centers(const Matrix& plan, const Matrix& query, const Matrix& support, const Labels& labels) {
  if (plan.rows() != query.rows()) fail(ErrorKind::validation, "reestimate_centers: plan rows != query count");
  const Eigen::Index ways = plan.cols();
  Centers sums = plan.transpose() * query;
  Vector mass = plan.colwise().sum().transpose();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= static_cast<std::size_t>(ways)) {
      fail(ErrorKind::validation, "reestimate_centers: support label out of range");
    }
    sums.row(labels[i]) += support.row(static_cast<Eigen::Index>(i));
    mass[labels[i]] += 1.0;
  }
  for (Eigen::Index j = 0; j < ways; ++j) {
    if (!(mass[j] > 0.0)) fail(ErrorKind::numerical, "reestimate_centers: zero mass for class " + std::to_string(j));
    sums.row(j) /= mass[j];
  }
  return sums;
}

Centers update_centers(const Centers& current, const Centers& target, double alpha) {
  return current + alpha * (target - current);
}

Prediction classify_map(const EpisodeView& episode, const MapConfig& cfg) {
  cfg.validate();
  const auto ways = static_cast<Eigen::Index>(episode.ways);
  const Eigen::Index nq = episode.query.rows();
  if (nq == 0) fail(ErrorKind::validation, "classify_map: no queries");
  if (episode.query.cols() != episode.support.cols()) {
    fail(ErrorKind::validation, "classify_map: support and query dimensions differ");
  }

  Marginals marginals = Marginals::balanced(nq, ways);
  if (cfg.class_prior) {
    if (cfg.class_prior->size() != ways) {
      fail(ErrorKind::config, "class prior has " + std::to_string(cfg.class_prior->size()) + " entries for " +
                                  std::to_string(ways) + " classes");
    }
    marginals = Marginals::from_prior(nq, *cfg.class_prior);
  }

  Centers centers = init_centers(episode.support, episode.support_labels, episode.ways);
  Prediction pred;
  pred.trajectory.reserve(static_cast<std::size_t>(cfg.n_steps));
  TransportPlan plan;
  for (int step = 0; step < cfg.n_steps; ++step) {
    const Matrix cost = squared_distances(episode.query, centers);
    plan = sinkhorn(cost, marginals, cfg.sinkhorn);
    pred.trajectory.push_back({plan.iterations, plan.residual, plan.converged, plan.log_domain});
    if (!plan.converged) ++pred.nonconverged;
    const Centers target = reestimate_centers(plan.m, episode.query, episode.support, episode.support_labels);
    centers = update_centers(centers, target, cfg.alpha);
  }

  pred.probabilities = plan.m.array().colwise() / plan.m.rowwise().sum().array();
  pred.labels = argmax_rows(pred.probabilities);
  return pred;
}

Prediction classify_map_imbalanced(const EpisodeView& episode, const Vector& prior, MapConfig cfg) {
  cfg.class_prior = prior;
  return classify_map(episode, cfg);
}

}  // namespace ptmap
