#pragma once

#include "ptmap/episode.hpp"
#include "ptmap/feature_bank.hpp"
#include "ptmap/map_classifier.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ptmap {

enum class Method { ncm, kmeans, map };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Whether a method may look at the whole query set. Only transductive
/// methods get the per-set mean subtraction, which uses query statistics.
bool is_transductive(Method method);

struct PreparedEpisode {
  Matrix support;
  Matrix query;
  std::size_t zero_rows = 0;
};

/// Power transform (if enabled) then, for transductive methods, mean
/// subtraction with unit projection (if enabled).
PreparedEpisode prepare_episode(const Episode& episode, const MapConfig& cfg, bool transductive);

struct EvalOptions {
  std::size_t episodes = 10000;
  std::size_t workers = 1;
  /// K-Means step count; 0 means "same as MapConfig::n_steps".
  int kmeans_steps = 0;
};

struct EvalReport {
  std::string method;
  std::size_t episodes = 0;
  double mean = 0.0;
  /// 1.96 * sample stdev / sqrt(N); 0 when N < 2.
  double ci95 = 0.0;
  std::vector<double> accuracies;
  std::vector<std::uint64_t> seeds;
  /// Wall clock, excluded from the CSV so that reports stay reproducible.
  double mean_seconds = 0.0;
  std::size_t nonconverged_sinkhorn = 0;
  std::size_t zero_rows = 0;
};

struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
};

MeanCi mean_ci95(std::span<const double> values);

using Classifier = std::function<Prediction(const EpisodeView&, std::uint64_t episode_seed)>;

/// Runs `opts.episodes` episodes; episode i uses seed derive_seed(spec.seed, i).
/// Results are reduced in index order, so the report does not depend on the
/// worker count.
EvalReport evaluate_with(const FeatureBank& bank, const EpisodeSpec& spec, std::string name,
                         bool transductive, const Classifier& classify, const MapConfig& cfg,
                         const EvalOptions& opts);

EvalReport evaluate(const FeatureBank& bank, const EpisodeSpec& spec, Method method, const MapConfig& cfg,
                    const EvalOptions& opts);

enum class SweepParam { beta, lambda, alpha, q, n_steps };

std::string_view to_string(SweepParam param);
SweepParam parse_sweep_param(std::string_view name);

struct SweepSpec {
  SweepParam parameter = SweepParam::lambda;
  std::vector<double> values;
  MapConfig base;
  EpisodeSpec episode;
  Method method = Method::map;
  EvalOptions options;
};

struct SweepPoint {
  double value = 0.0;
  EvalReport report;
};

/// One evaluation per value, all sharing the master seed in spec.episode.
std::vector<SweepPoint> sweep(const FeatureBank& bank, const SweepSpec& spec);

/// `episode,seed,accuracy` rows followed by nothing else.
void write_episodes_csv(const EvalReport& report, std::ostream& out);
/// `parameter,value,method,episodes,mean,ci95`
void write_sweep_csv(SweepParam parameter, std::span<const SweepPoint> points, std::ostream& out);
/// Summary including timing and diagnostic counters.
std::string report_json(const EvalReport& report);

}  // namespace ptmap
