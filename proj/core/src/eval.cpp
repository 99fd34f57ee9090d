#include "ptmap/eval.hpp"

#include "ptmap/baselines.hpp"
#include "ptmap/error.hpp"
#include "ptmap/preprocess.hpp"
#include "ptmap/rng.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

namespace ptmap {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ncm:
      return "ncm";
    case Method::kmeans:
      return "kmeans";
    case Method::map:
      return "map";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "ncm") return Method::ncm;
  if (name == "kmeans") return Method::kmeans;
  if (name == "map") return Method::map;
  fail(ErrorKind::config, "unknown method '" + std::string(name) + "' (expected ncm, kmeans or map)");
}

bool is_transductive(Method method) { return method != Method::ncm; }

PreparedEpisode prepare_episode(const Episode& episode, const MapConfig& cfg, bool transductive) {
  PreparedEpisode out;
  if (cfg.use_power_transform) {
    out.support = power_transform_rows(episode.support_feats, cfg.power);
    out.query = power_transform_rows(episode.query_feats, cfg.power);
  } else {
    out.support = episode.support_feats;
    out.query = episode.query_feats;
  }
  if (transductive && cfg.use_mean_sub) {
    CenteredPair centered = trans_mean_sub(out.support, out.query, cfg.shared_mean);
    out.support = std::move(centered.support);
    out.query = std::move(centered.query);
    out.zero_rows = centered.zero_rows;
  }
  return out;
}

MeanCi mean_ci95(std::span<const double> values) {
  MeanCi out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

namespace {

struct EpisodeResult {
  double accuracy = 0.0;
  double seconds = 0.0;
  std::size_t nonconverged = 0;
  std::size_t zero_rows = 0;
};

}  // namespace

EvalReport evaluate_with(const FeatureBank& bank, const EpisodeSpec& spec, std::string name, bool transductive,
                         const Classifier& classify, const MapConfig& cfg, const EvalOptions& opts) {
  spec.validate();
  cfg.validate();
  if (opts.episodes == 0) fail(ErrorKind::config, "evaluation needs at least one episode");
  const std::size_t n = opts.episodes;
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, n));

  std::vector<EpisodeResult> results(n);
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = derive_seed(spec.seed, i);

  // Each worker records its first failure; the lowest failing index wins so
  // the reported error does not depend on scheduling.
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, n);

  auto run = [&](std::size_t worker) {
    for (std::size_t i = worker; i < n; i += workers) {
      try {
        const auto start = std::chrono::steady_clock::now();
        EpisodeSpec episode_spec = spec;
        episode_spec.seed = seeds[i];
        const Episode episode = sample_episode(bank, episode_spec);
        const PreparedEpisode prepared = prepare_episode(episode, cfg, transductive);
        const EpisodeView view{prepared.support, episode.support_labels, prepared.query, episode.ways()};
        const Prediction pred = classify(view, seeds[i]);
        results[i].accuracy = episode_accuracy(pred, episode);
        results[i].nonconverged = pred.nonconverged;
        results[i].zero_rows = prepared.zero_rows;
        results[i].seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      } catch (const Error& e) {
        errors[worker] = std::make_exception_ptr(Error(e.kind(), "episode " + std::to_string(i) + ": " + e.what()));
        error_index[worker] = i;
        return;
      } catch (...) {
        errors[worker] = std::current_exception();
        error_index[worker] = i;
        return;
      }
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  std::size_t first = n;
  std::exception_ptr first_error;
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w] && error_index[w] < first) {
      first = error_index[w];
      first_error = errors[w];
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  EvalReport report;
  report.method = std::move(name);
  report.episodes = n;
  report.accuracies.reserve(n);
  double seconds = 0.0;
  for (const EpisodeResult& r : results) {
    report.accuracies.push_back(r.accuracy);
    report.nonconverged_sinkhorn += r.nonconverged;
    report.zero_rows += r.zero_rows;
    seconds += r.seconds;
  }
  report.seeds = std::move(seeds);
  const MeanCi stats = mean_ci95(report.accuracies);
  report.mean = stats.mean;
  report.ci95 = stats.ci95;
  report.mean_seconds = seconds / static_cast<double>(n);
  return report;
}

EvalReport evaluate(const FeatureBank& bank, const EpisodeSpec& spec, Method method, const MapConfig& cfg,
                    const EvalOptions& opts) {
  Classifier classify;
  switch (method) {
    case Method::ncm:
      classify = [](const EpisodeView& view, std::uint64_t) { return classify_ncm(view); };
      break;
    case Method::kmeans: {
      const int steps = opts.kmeans_steps > 0 ? opts.kmeans_steps : cfg.n_steps;
      classify = [steps](const EpisodeView& view, std::uint64_t) { return classify_kmeans(view, steps); };
      break;
    }
    case Method::map:
      classify = [&cfg](const EpisodeView& view, std::uint64_t) { return classify_map(view, cfg); };
      break;
  }
  return evaluate_with(bank, spec, std::string(to_string(method)), is_transductive(method), classify, cfg, opts);
}

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::beta:
      return "beta";
    case SweepParam::lambda:
      return "lambda";
    case SweepParam::alpha:
      return "alpha";
    case SweepParam::q:
      return "q";
    case SweepParam::n_steps:
      return "n_steps";
  }
  return "unknown";
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "beta") return SweepParam::beta;
  if (name == "lambda") return SweepParam::lambda;
  if (name == "alpha") return SweepParam::alpha;
  if (name == "q") return SweepParam::q;
  if (name == "n_steps" || name == "n-steps") return SweepParam::n_steps;
  fail(ErrorKind::config, "unknown sweep parameter '" + std::string(name) + "'");
}

std::vector<SweepPoint> sweep(const FeatureBank& bank, const SweepSpec& spec) {
  if (spec.values.empty()) fail(ErrorKind::config, "sweep: empty value list");
  std::vector<SweepPoint> points;
  points.reserve(spec.values.size());
  for (double value : spec.values) {
    MapConfig cfg = spec.base;
    EpisodeSpec episode = spec.episode;
    EvalOptions opts = spec.options;
    switch (spec.parameter) {
      case SweepParam::beta:
        cfg.power.beta = value;
        break;
      case SweepParam::lambda:
        cfg.sinkhorn.lambda = value;
        break;
      case SweepParam::alpha:
        cfg.alpha = value;
        break;
      case SweepParam::q:
        if (!(value >= 1.0) || value != std::floor(value)) fail(ErrorKind::config, "sweep: q values must be positive integers");
        episode.q_per_class = {static_cast<std::size_t>(value)};
        break;
      case SweepParam::n_steps:
        if (!(value >= 1.0) || value != std::floor(value)) {
          fail(ErrorKind::config, "sweep: n_steps values must be positive integers");
        }
        cfg.n_steps = static_cast<int>(value);
        break;
    }
    points.push_back({value, evaluate(bank, episode, spec.method, cfg, opts)});
  }
  return points;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_episodes_csv(const EvalReport& report, std::ostream& out) {
  out << "episode,seed,accuracy\n";
  for (std::size_t i = 0; i < report.accuracies.size(); ++i) {
    out << i << ',' << report.seeds[i] << ',' << format_double(report.accuracies[i]) << '\n';
  }
}

void write_sweep_csv(SweepParam parameter, std::span<const SweepPoint> points, std::ostream& out) {
  out << "parameter,value,method,episodes,mean,ci95\n";
  for (const SweepPoint& p : points) {
    out << to_string(parameter) << ',' << format_double(p.value) << ',' << p.report.method << ','
        << p.report.episodes << ',' << format_double(p.report.mean) << ',' << format_double(p.report.ci95) << '\n';
  }
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["episodes"] = report.episodes;
  j["mean_accuracy"] = report.mean;
  j["ci95"] = report.ci95;
  j["mean_seconds_per_episode"] = report.mean_seconds;
  j["diagnostics"] = {{"nonconverged_sinkhorn", report.nonconverged_sinkhorn}, {"zero_rows", report.zero_rows}};
  return j.dump(2);
}

}  // namespace ptmap
