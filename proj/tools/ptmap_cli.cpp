#include "CLI11.hpp"

#include "ptmap/ptmap.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

using namespace ptmap;

namespace {

struct ModelFlags {
  std::optional<double> beta;
  std::optional<double> epsilon;
  bool no_pt = false;
  bool no_tms = false;
  bool shared_mean = false;
  std::optional<double> lambda;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<double> alpha;
  std::optional<int> steps;
  std::vector<double> prior;
};

struct EpisodeFlags {
  std::string bank;
  std::string method = "map";
  std::optional<std::size_t> w;
  std::size_t s = 1;
  std::size_t q = 15;
  std::vector<std::size_t> q_list;
  std::size_t episodes = 10000;
  std::uint64_t seed = 0;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  int kmeans_steps = 0;
};

void add_model_flags(CLI::App& cmd, ModelFlags& f) {
  cmd.add_option("--beta", f.beta, "Power transform exponent (0 selects log)");
  cmd.add_option("--epsilon", f.epsilon, "Power transform offset");
  cmd.add_flag("--no-pt", f.no_pt, "Skip the power transform");
  cmd.add_flag("--no-tms", f.no_tms, "Skip mean subtraction and projection");
  cmd.add_flag("--shared-mean", f.shared_mean, "Subtract one mean over support and query");
  cmd.add_option("--lambda", f.lambda, "Sinkhorn entropic regularization");
  cmd.add_option("--tol", f.tol, "Sinkhorn marginal tolerance");
  cmd.add_option("--max-iters", f.max_iters, "Sinkhorn iteration cap");
  cmd.add_option("--alpha", f.alpha, "Center update inertia");
  cmd.add_option("--steps", f.steps, "MAP or K-Means iterations");
  cmd.add_option("--prior", f.prior, "Expected queries per class, comma separated")->delimiter(',');
}

void add_episode_flags(CLI::App& cmd, EpisodeFlags& f) {
  cmd.add_option("--bank", f.bank, "Feature bank (.fsb or .csv)")->required();
  cmd.add_option("--method", f.method, "Classifier")->check(CLI::IsMember({"ncm", "kmeans", "map"}));
  cmd.add_option("--w", f.w, "Ways (default 5, or the --q-list length)");
  cmd.add_option("--s", f.s, "Shots");
  cmd.add_option("--q", f.q, "Queries per class");
  cmd.add_option("--q-list", f.q_list, "Queries per class, one count per way")->delimiter(',');
  cmd.add_option("--episodes", f.episodes, "Episode count");
  cmd.add_option("--seed", f.seed, "Master seed");
  cmd.add_option("--workers", f.workers, "Worker threads")->envname("PTMAP_WORKERS");
}

MapConfig model_config(const ModelFlags& f, std::size_t shots) {
  MapConfig cfg = MapConfig::defaults_for_shots(shots);
  if (f.beta) cfg.power.beta = *f.beta;
  if (f.epsilon) cfg.power.epsilon = *f.epsilon;
  cfg.use_power_transform = !f.no_pt;
  cfg.use_mean_sub = !f.no_tms;
  cfg.shared_mean = f.shared_mean;
  if (f.lambda) cfg.sinkhorn.lambda = *f.lambda;
  if (f.tol) cfg.sinkhorn.tol = *f.tol;
  if (f.max_iters) cfg.sinkhorn.max_iters = *f.max_iters;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.steps) cfg.n_steps = *f.steps;
  if (!f.prior.empty()) cfg.class_prior = Eigen::Map<const Vector>(f.prior.data(), static_cast<Eigen::Index>(f.prior.size()));
  cfg.validate();
  return cfg;
}

EpisodeSpec episode_spec(const EpisodeFlags& f) {
  if (!f.q_list.empty() && f.w && *f.w != f.q_list.size()) {
    fail(ErrorKind::config, "--q-list has " + std::to_string(f.q_list.size()) + " entries but --w is " +
                                std::to_string(*f.w));
  }
  EpisodeSpec spec = f.q_list.empty() ? EpisodeSpec::balanced(f.w.value_or(5), f.s, f.q, f.seed)
                                      : EpisodeSpec::imbalanced(f.s, f.q_list, f.seed);
  spec.validate();
  return spec;
}

EvalOptions eval_options(const EpisodeFlags& f, const ModelFlags& m) {
  EvalOptions opts;
  opts.episodes = f.episodes;
  opts.workers = f.workers;
  if (m.steps) opts.kmeans_steps = *m.steps;
  return opts;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
  return out;
}

int run_eval(const EpisodeFlags& ef, const ModelFlags& mf, const std::string& csv, const std::string& json) {
  const FeatureBank bank = load_bank_any(ef.bank);
  const EvalReport report =
      evaluate(bank, episode_spec(ef), parse_method(ef.method), model_config(mf, ef.s), eval_options(ef, mf));
  if (!csv.empty()) {
    auto out = open_output(csv);
    write_episodes_csv(report, out);
  }
  const std::string summary = report_json(report);
  if (!json.empty()) {
    auto out = open_output(json);
    out << summary << '\n';
  }
  std::cout << summary << '\n';
  return 0;
}

int run_sweep(const EpisodeFlags& ef, const ModelFlags& mf, const std::string& param,
              const std::vector<double>& values, const std::string& csv) {
  const FeatureBank bank = load_bank_any(ef.bank);
  SweepSpec spec;
  spec.parameter = parse_sweep_param(param);
  spec.values = values;
  spec.base = model_config(mf, ef.s);
  spec.episode = episode_spec(ef);
  spec.method = parse_method(ef.method);
  spec.options = eval_options(ef, mf);
  const auto points = sweep(bank, spec);
  if (!csv.empty()) {
    auto out = open_output(csv);
    write_sweep_csv(spec.parameter, points, out);
  }
  write_sweep_csv(spec.parameter, points, std::cout);
  return 0;
}

int run_inspect(const std::string& path, const PowerParams& power) {
  const FeatureBank bank = load_bank_any(path);
  std::printf("samples %zu\ndim %zu\nclasses %zu\nraw %s\n", bank.size(), bank.dim(), bank.num_classes(),
              bank.raw() ? "yes" : "no");
  for (std::size_t c = 0; c < bank.num_classes(); ++c) {
    std::printf("class %zu: %zu samples\n", c, bank.class_rows(c).size());
  }
  if (bank.size() < 3) return 0;
  const Matrix x = bank.features().cast<double>();
  const Vector before = column_skewness(x);
  std::optional<Vector> after;
  if (bank.raw()) after = column_skewness(power_transform_rows(x, power));
  std::printf("feature,skew_raw%s\n", after ? ",skew_pt" : "");
  for (Eigen::Index k = 0; k < before.size(); ++k) {
    if (after) {
      std::printf("%td,%.6f,%.6f\n", k, before[k], (*after)[k]);
    } else {
      std::printf("%td,%.6f\n", k, before[k]);
    }
  }
  std::printf("mean_abs_skew_raw %.6f\n", before.cwiseAbs().mean());
  if (after) std::printf("mean_abs_skew_pt %.6f\n", after->cwiseAbs().mean());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-transformed optimal-transport few-shot classification"};
  app.require_subcommand(1);

  EpisodeFlags ef;
  ModelFlags mf;

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a method over sampled episodes");
  add_episode_flags(*eval_cmd, ef);
  add_model_flags(*eval_cmd, mf);
  std::string csv;
  std::string json;
  eval_cmd->add_option("--csv", csv, "Per-episode accuracy CSV");
  eval_cmd->add_option("--json", json, "Summary JSON");

  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate over a grid of one hyperparameter");
  add_episode_flags(*sweep_cmd, ef);
  add_model_flags(*sweep_cmd, mf);
  std::string param;
  std::vector<double> values;
  sweep_cmd->add_option("--param", param, "beta, lambda, alpha, q or n_steps")->required();
  sweep_cmd->add_option("--values", values, "Comma separated grid")->delimiter(',')->required();
  sweep_cmd->add_option("--csv", csv, "Sweep CSV");

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic feature bank");
  SynthSpec synth;
  std::string synth_out;
  std::string mode = "exponential";
  synth_cmd->add_option("--out", synth_out, "Output bank")->required();
  synth_cmd->add_option("--w", synth.w_classes, "Classes");
  synth_cmd->add_option("--per-class", synth.per_class, "Samples per class");
  synth_cmd->add_option("--d", synth.d, "Feature dimension");
  synth_cmd->add_option("--center-scale", synth.center_scale, "Spread of class centers");
  synth_cmd->add_option("--noise-scale", synth.noise_scale, "Within-class noise");
  synth_cmd->add_option("--mode", mode, "exponential or gaussian")->check(CLI::IsMember({"exponential", "gaussian"}));
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");

  auto* concat_cmd = app.add_subcommand("concat", "Concatenate two banks along the feature axis");
  std::string left;
  std::string right;
  std::string concat_out;
  concat_cmd->add_option("first", left, "First bank")->required();
  concat_cmd->add_option("second", right, "Second bank")->required();
  concat_cmd->add_option("--out", concat_out, "Output bank")->required();

  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a bank and its per-feature skewness");
  std::string inspect_path;
  PowerParams inspect_power;
  inspect_cmd->add_option("bank", inspect_path, "Feature bank")->required();
  inspect_cmd->add_option("--beta", inspect_power.beta, "Power transform exponent");
  inspect_cmd->add_option("--epsilon", inspect_power.epsilon, "Power transform offset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*eval_cmd) return run_eval(ef, mf, csv, json);
    if (*sweep_cmd) return run_sweep(ef, mf, param, values, csv);
    if (*synth_cmd) {
      synth.skew_mode = mode == "gaussian" ? SkewMode::gaussian : SkewMode::exponential;
      save_bank(synth_bank(synth), synth_out);
      return 0;
    }
    if (*concat_cmd) {
      save_bank(concat_banks(load_bank_any(left), load_bank_any(right)), concat_out);
      return 0;
    }
    if (*inspect_cmd) {
      inspect_power.validate();
      return run_inspect(inspect_path, inspect_power);
    }
  } catch (const Error& e) {
    std::cerr << "ptmap: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ptmap: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
