#include "ptmap/baselines.hpp"

#include "ptmap/error.hpp"
#include "ptmap/map_classifier.hpp"
#include "ptmap/sinkhorn.hpp"

namespace ptmap {

namespace {

Labels nearest(const Matrix& points, const Matrix& centers) {
  return argmax_rows(-squared_distances(points, centers));
}

}  // namespace

Prediction classify_ncm(const EpisodeView& episode) {
  const Centers centers = init_centers(episode.support, episode.support_labels, episode.ways);
  Prediction pred;
  pred.labels = nearest(episode.query, centers);
  pred.probabilities = one_hot(pred.labels, episode.ways);
  return pred;
}

Prediction classify_kmeans(const EpisodeView& episode, int n_steps, std::vector<double>* objective_trace) {
  if (n_steps < 1) fail(ErrorKind::config, "kmeans: n_steps must be >= 1");
  Centers centroids = init_centers(episode.support, episode.support_labels, episode.ways);
  const auto ways = static_cast<Eigen::Index>(episode.ways);

  Labels assignment;
  for (int step = 0; step < n_steps; ++step) {
    assignment = nearest(episode.query, centroids);

    Matrix sums = Matrix::Zero(ways, centroids.cols());
    Vector counts = Vector::Zero(ways);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      sums.row(assignment[i]) += episode.query.row(static_cast<Eigen::Index>(i));
      counts[assignment[i]] += 1.0;
    }
    for (std::size_t i = 0; i < episode.support_labels.size(); ++i) {
      sums.row(episode.support_labels[i]) += episode.support.row(static_cast<Eigen::Index>(i));
      counts[episode.support_labels[i]] += 1.0;
    }
    for (Eigen::Index j = 0; j < ways; ++j) {
      // An empty cluster keeps its previous centroid.
      if (counts[j] > 0.0) centroids.row(j) = sums.row(j) / counts[j];
    }
    if (objective_trace) objective_trace->push_back(kmeans_objective(episode, centroids, assignment));
  }

  Prediction pred;
  pred.labels = std::move(assignment);
  pred.probabilities = one_hot(pred.labels, episode.ways);
  return pred;
}

double kmeans_objective(const EpisodeView& episode, const Matrix& centroids, const Labels& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    total += (episode.query.row(static_cast<Eigen::Index>(i)) - centroids.row(assignment[i])).squaredNorm();
  }
  for (std::size_t i = 0; i < episode.support_labels.size(); ++i) {
    total += (episode.support.row(static_cast<Eigen::Index>(i)) - centroids.row(episode.support_labels[i])).squaredNorm();
  }
  return total;
}

}  // namespace ptmap
