#include "doctest.h"

#include "json.hpp"

#include "ptmap/error.hpp"
#include "ptmap/eval.hpp"
#include "ptmap/rng.hpp"

#include <cmath>
#include <sstream>

using namespace ptmap;

namespace {

const FeatureBank& overlapping_bank() {
  static const FeatureBank bank = synth_bank({8, 100, 32, 0.5, 1.0, SkewMode::exponential, 8});
  return bank;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("separable bank scores perfectly for every method") {
    const FeatureBank bank = synth_bank({5, 40, 16, 1.0, 1e-4, SkewMode::exponential, 2});
    EvalOptions opts;
    opts.episodes = 50;
    for (Method m : {Method::ncm, Method::kmeans, Method::map}) {
      const EvalReport r = evaluate(bank, EpisodeSpec::balanced(5, 1, 15, 1), m, MapConfig::defaults_for_shots(1), opts);
      CHECK(r.mean == 1.0);
      CHECK(r.ci95 == 0.0);
      CHECK(r.method == to_string(m));
    }
  }

  TEST_CASE("random-label classifier sits at chance") {
    EvalOptions opts;
    opts.episodes = 2000;
    const Classifier random_labels = [](const EpisodeView& view, std::uint64_t seed) {
      Rng rng(seed);
      Prediction pred;
      for (Eigen::Index i = 0; i < view.query.rows(); ++i) pred.labels.push_back(static_cast<Label>(rng.below(view.ways)));
      pred.probabilities = one_hot(pred.labels, view.ways);
      return pred;
    };
    const EvalReport r = evaluate_with(overlapping_bank(), EpisodeSpec::balanced(5, 1, 15, 3), "random", false,
                                       random_labels, MapConfig{}, opts);
    CHECK(std::abs(r.mean - 0.2) <= 3.0 * r.ci95);
  }

  TEST_CASE("worker count does not change the report") {
    EvalOptions one;
    one.episodes = 64;
    EvalOptions eight = one;
    eight.workers = 8;
    const MapConfig cfg = MapConfig::defaults_for_shots(1);
    const EpisodeSpec spec = EpisodeSpec::balanced(5, 1, 15, 99);
    for (Method m : {Method::ncm, Method::map}) {
      const EvalReport a = evaluate(overlapping_bank(), spec, m, cfg, one);
      const EvalReport b = evaluate(overlapping_bank(), spec, m, cfg, eight);
      CHECK(a.accuracies == b.accuracies);
      CHECK(a.mean == b.mean);
      CHECK(a.ci95 == b.ci95);
      std::ostringstream ca;
      std::ostringstream cb;
      write_episodes_csv(a, ca);
      write_episodes_csv(b, cb);
      CHECK(ca.str() == cb.str());
    }
  }

  TEST_CASE("ci95 matches an independent recomputation") {
    EvalOptions opts;
    opts.episodes = 200;
    const EvalReport r =
        evaluate(overlapping_bank(), EpisodeSpec::balanced(5, 1, 15, 4), Method::ncm, MapConfig{}, opts);
    double mean = 0.0;
    for (double a : r.accuracies) mean += a;
    mean /= 200.0;
    double var = 0.0;
    for (double a : r.accuracies) var += (a - mean) * (a - mean);
    var /= 199.0;
    CHECK(std::abs(r.mean - mean) <= 1e-12);
    CHECK(std::abs(r.ci95 - 1.96 * std::sqrt(var) / std::sqrt(200.0)) <= 1e-12);
    CHECK(r.mean >= 0.0);
    CHECK(r.mean <= 1.0);

    const std::vector<double> single{0.5};
    CHECK(mean_ci95(single).ci95 == 0.0);
  }

  TEST_CASE("episode errors carry the episode index") {
    const FeatureBank tiny = synth_bank({5, 3, 4, 1.0, 1.0, SkewMode::exponential, 1});
    EvalOptions opts;
    opts.episodes = 4;
    try {
      evaluate(tiny, EpisodeSpec::balanced(5, 1, 15, 0), Method::ncm, MapConfig{}, opts);
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("episode 0") != std::string::npos);
      CHECK(e.kind() == ErrorKind::validation);
    }
  }

  TEST_CASE("power transform on a non-raw bank is rejected") {
    const FeatureBank gauss = synth_bank({5, 30, 4, 1.0, 1.0, SkewMode::gaussian, 1});
    EvalOptions opts;
    opts.episodes = 2;
    CHECK_THROWS_AS(evaluate(gauss, EpisodeSpec::balanced(5, 1, 5, 0), Method::map, MapConfig{}, opts), Error);
    MapConfig no_pt;
    no_pt.use_power_transform = false;
    CHECK_NOTHROW(evaluate(gauss, EpisodeSpec::balanced(5, 1, 5, 0), Method::map, no_pt, opts));
  }

  TEST_CASE("mean subtraction only for transductive methods") {
    const Episode ep = sample_episode(overlapping_bank(), EpisodeSpec::balanced(5, 1, 15, 2));
    const MapConfig cfg;
    const PreparedEpisode inductive = prepare_episode(ep, cfg, is_transductive(Method::ncm));
    const PreparedEpisode transductive = prepare_episode(ep, cfg, is_transductive(Method::map));
    CHECK((inductive.query.array() >= 0.0).all());
    CHECK(transductive.query.colwise().mean().norm() < inductive.query.colwise().mean().norm());
  }

  TEST_CASE("sweep runs one evaluation per value with the shared seed") {
    SweepSpec spec;
    spec.parameter = SweepParam::q;
    spec.values = {5, 10};
    spec.base = MapConfig::defaults_for_shots(1);
    spec.episode = EpisodeSpec::balanced(5, 1, 15, 12);
    spec.options.episodes = 20;
    const auto points = sweep(overlapping_bank(), spec);
    REQUIRE(points.size() == 2);
    CHECK(points[0].value == 5);
    const EvalReport direct =
        evaluate(overlapping_bank(), EpisodeSpec::balanced(5, 1, 10, 12), Method::map, spec.base, spec.options);
    CHECK(points[1].report.accuracies == direct.accuracies);

    std::ostringstream csv;
    write_sweep_csv(spec.parameter, points, csv);
    CHECK(csv.str().rfind("parameter,value,method,episodes,mean,ci95\nq,5,map,20,", 0) == 0);

    spec.values.clear();
    CHECK_THROWS_AS(sweep(overlapping_bank(), spec), Error);
    spec.values = {2.5};
    CHECK_THROWS_AS(sweep(overlapping_bank(), spec), Error);
  }

  TEST_CASE("json summary") {
    EvalOptions opts;
    opts.episodes = 10;
    const EvalReport r =
        evaluate(overlapping_bank(), EpisodeSpec::balanced(5, 1, 15, 4), Method::kmeans, MapConfig{}, opts);
    const auto j = nlohmann::json::parse(report_json(r));
    CHECK(j["method"] == "kmeans");
    CHECK(j["episodes"] == 10);
    CHECK(j["mean_accuracy"].get<double>() == r.mean);
    CHECK(j.contains("diagnostics"));
  }

  TEST_CASE("name parsing") {
    CHECK(parse_method("map") == Method::map);
    CHECK_THROWS_AS(parse_method("svm"), Error);
    CHECK(parse_sweep_param("n_steps") == SweepParam::n_steps);
    CHECK_THROWS_AS(parse_sweep_param("gamma"), Error);
  }
}
