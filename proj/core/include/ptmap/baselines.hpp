#pragma once

#include "ptmap/episode.hpp"

namespace ptmap {

/// Inductive nearest class mean: each query independently takes the class
/// of the closest support mean (squared Euclidean, ties to the lowest id).
Prediction classify_ncm(const EpisodeView& episode);

/// Hard K-Means seeded with the support means. Supports stay anchored to
/// their own class and always contribute to its centroid; queries are
/// reassigned every step. Labels are the assignment made in the last step.
/// When objective_trace is given, the objective after each centroid update
/// is appended to it.
Prediction classify_kmeans(const EpisodeView& episode, int n_steps, std::vector<double>* objective_trace = nullptr);

/// Within-cluster squared distance of supports (to their own class) and
/// queries (to their assigned class).
double kmeans_objective(const EpisodeView& episode, const Matrix& centroids, const Labels& assignment);

}  // namespace ptmap
