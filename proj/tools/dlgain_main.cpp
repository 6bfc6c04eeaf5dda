#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dlgain/error.hpp"
#include "dlgain/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out = ".";
  std::optional<std::string> scheme;
  std::optional<std::string> fading;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
  auto* opt = cmd->add_option("--config", f.config, "JSON experiment config");
  if (needs_config) opt->required();
  cmd->add_option("--seed", f.seed, "Master seed (overrides config)");
  cmd->add_option("--threads", f.threads, "Worker threads (overrides config)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--scheme", f.scheme, "Precoder")->check(CLI::IsMember({"mr", "zf"}));
  cmd->add_option("--fading", f.fading, "Fading model")
      ->check(CLI::IsMember({"correlated", "uncorrelated"}));
}

dlgain::ExperimentSpec load_spec(const CommonFlags& f) {
  dlgain::ExperimentSpec spec = dlgain::load_experiment_spec(f.config);
  if (f.seed) spec.seed = *f.seed;
  if (f.threads) spec.threads = *f.threads;
  if (f.scheme) spec.scheme = dlgain::parse_scheme(*f.scheme);
  if (f.fading) spec.network.fading_mode = dlgain::parse_fading_mode(*f.fading);
  spec.validate();
  return spec;
}

fs::path output_dir(const CommonFlags& f) {
  fs::path dir(f.out);
  fs::create_directories(dir);
  return dir;
}

dlgain::DatasetOptions dataset_options(const dlgain::ExperimentSpec& spec) {
  dlgain::DatasetOptions opt;
  opt.precoder.scheme = spec.scheme;
  opt.precoder.zf_norm = spec.network.fading_mode == dlgain::FadingMode::kUncorrelated
                             ? dlgain::ZfNormMode::kAnalyticIid
                             : dlgain::ZfNormMode::kMonteCarlo;
  opt.precoder.zf_norm_draws = spec.zf_norm_draws;
  opt.mc_blocks = spec.mc_blocks;
  opt.threads = spec.threads;
  return opt;
}

dlgain::Dataset make_dataset(const dlgain::ExperimentSpec& spec) {
  return dlgain::generate_dataset(spec.network, spec.n_large_scale, spec.n_small_scale,
                                  dataset_options(spec), spec.seed);
}

int cmd_run(const CommonFlags& f, const std::optional<std::string>& model_path) {
  dlgain::ExperimentSpec spec = load_spec(f);
  if (model_path) spec.model_path = *model_path;
  spec.validate();
  dlgain::MlpModel model;
  if (spec.model_path) model = dlgain::load_model(*spec.model_path);
  const dlgain::ExperimentResult result =
      dlgain::run_experiment(spec, spec.model_path ? &model : nullptr);
  const fs::path out = output_dir(f) / "results.csv";
  dlgain::write_results_csv(result, out);
  std::cout << dlgain::report_table(result);
  std::fprintf(stderr, "wrote %s (%d scenarios, %.1f s)\n", out.c_str(),
               result.scenarios_completed, result.runtime_seconds);
  if (result.failed) {
    std::cerr << "run failed: " << result.failure << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_gen_data(const CommonFlags& f) {
  const dlgain::ExperimentSpec spec = load_spec(f);
  const dlgain::Dataset data = make_dataset(spec);
  const fs::path out = output_dir(f) / "dataset.csv";
  dlgain::write_dataset_csv(data, out);
  std::fprintf(stderr, "wrote %s (%lld rows)\n", out.c_str(), static_cast<long long>(data.size()));
  return kExitOk;
}

void print_evaluation(const dlgain::ModelEvaluation& ev) {
  std::printf("test samples   %lld\nmodel MAE      %.6g\nhardening MAE  %.6g\n",
              static_cast<long long>(ev.samples), ev.model_mae, ev.hardening_mae);
}

int cmd_train(const CommonFlags& f, const std::optional<std::string>& data_path) {
  const dlgain::ExperimentSpec spec = load_spec(f);
  const fs::path dir = output_dir(f);
  dlgain::Dataset data;
  if (data_path) {
    data = dlgain::read_dataset_csv(*data_path);
  } else {
    data = make_dataset(spec);
    dlgain::write_dataset_csv(data, dir / "dataset.csv");
  }
  const dlgain::MlpModel model = dlgain::fit_default_model(data, spec.training, spec.seed);
  dlgain::save_model(model, dir / "model.dlgm");
  const auto& meta = model.metadata;
  std::printf("best epoch     %d of %d\nvalidation MAE %.6g\n", meta.best_epoch, meta.epochs,
              meta.best_validation_mae);
  print_evaluation(dlgain::evaluate_model(model, data));
  return kExitOk;
}

int cmd_eval_model(const CommonFlags& f, const std::string& model_path,
                   const std::optional<std::string>& data_path) {
  const dlgain::MlpModel model = dlgain::load_model(model_path);
  dlgain::Dataset data;
  if (data_path) {
    data = dlgain::read_dataset_csv(*data_path);
  } else {
    if (f.config.empty()) throw CLI::RequiredError("--config or --data");
    data = make_dataset(load_spec(f));
  }
  print_evaluation(dlgain::evaluate_model(model, data));
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& files) {
  for (const auto& file : files) {
    const dlgain::ExperimentResult result = dlgain::read_results_csv(file);
    std::cout << "== " << file << " (seed " << result.seed << ", "
              << result.scenarios_completed << " scenarios)\n"
              << dlgain::report_table(result);
    if (result.failed) std::cout << "note: " << result.failure << '\n';
  }
  return kExitOk;
}

bool is_config_error(dlgain::ErrorCode code) {
  using dlgain::ErrorCode;
  return code == ErrorCode::kConfigInvalid || code == ErrorCode::kInsufficientAntennas ||
         code == ErrorCode::kWrongMode;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Downlink effective-gain estimation simulator"};
  app.require_subcommand(1);

  CommonFlags run_f, gen_f, train_f, eval_f;
  std::optional<std::string> run_model, train_data, eval_data;
  std::string eval_model;
  std::vector<std::string> report_files;

  auto* run = app.add_subcommand("run", "Run an estimator comparison and write results.csv");
  add_common(run, run_f, true);
  run->add_option("--model", run_model, "Trained model for the neural estimator");

  auto* gen = app.add_subcommand("gen-data", "Generate a training dataset (dataset.csv)");
  add_common(gen, gen_f, true);

  auto* tr = app.add_subcommand("train", "Train the MLP and write model.dlgm");
  add_common(tr, train_f, true);
  tr->add_option("--data", train_data, "Existing dataset.csv (generated when omitted)");

  auto* ev = app.add_subcommand("eval-model", "Test-split MAE of a model and the hardening mean");
  add_common(ev, eval_f, false);
  ev->add_option("--model", eval_model, "Model file")->required();
  ev->add_option("--data", eval_data, "Dataset file (generated from --config when omitted)");

  auto* rep = app.add_subcommand("report", "Percentile tables from result files");
  rep->add_option("files", report_files, "results.csv files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_f, run_model);
    if (*gen) return cmd_gen_data(gen_f);
    if (*tr) return cmd_train(train_f, train_data);
    if (*ev) return cmd_eval_model(eval_f, eval_model, eval_data);
    if (*rep) return cmd_report(report_files);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dlgain::Error& e) {
    std::cerr << "error [" << dlgain::to_string(e.code()) << "]: " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
