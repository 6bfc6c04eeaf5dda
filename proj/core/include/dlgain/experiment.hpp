#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dlgain/config.hpp"
#include "dlgain/dataset.hpp"
#include "dlgain/metrics.hpp"
#include "dlgain/mlp.hpp"
#include "dlgain/precoding.hpp"

namespace dlgain {

// Rows emitted per user, in this order when requested.
inline constexpr std::string_view kEstHardening = "hardening";
inline constexpr std::string_view kEstModelAided = "model_aided";
inline constexpr std::string_view kEstModelAidedLiteral = "model_aided_literal";
inline constexpr std::string_view kEstModelAidedBlind = "model_aided_blind";
inline constexpr std::string_view kEstOracle = "oracle";
inline constexpr std::string_view kEstNeural = "neural";
inline constexpr std::string_view kEstPerfectCsi = "perfect_csi";

struct ExperimentSpec {
  NetworkConfig network;
  Scheme scheme = Scheme::kMr;
  // Any of hardening, model_aided, oracle, neural. model_aided also emits
  // the literal and always-blind variants.
  std::vector<std::string> estimators = {"hardening", "model_aided", "oracle"};
  bool perfect_csi = true;
  int n_scenarios = 10;
  int n_blocks = 500;
  std::uint64_t seed = 1;
  double theta_factor = 1.0;
  std::optional<std::filesystem::path> model_path;
  int threads = 1;
  // Blocks for T when no closed form exists (ZF, correlated fading).
  int mc_blocks = 2000;
  int zf_norm_draws = 10000;

  // Dataset and training settings used by gen-data and train.
  int n_large_scale = 200;
  int n_small_scale = 200;
  TrainOptions training;

  bool wants(std::string_view estimator) const;
  // Throws kConfigInvalid.
  void validate() const;
};

// Flat JSON object holding network and experiment keys.
ExperimentSpec parse_experiment_spec(std::string_view json_text);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct UserRecord {
  int scenario_id = 0;
  int cell = 0;
  int user = 0;
  std::string estimator;
  double nmse = 0.0;
  double se_bits = 0.0;
  double branch_fraction_blind = 0.0;
};

struct ExperimentResult {
  std::uint64_t seed = 0;
  std::vector<UserRecord> records;
  int scenarios_completed = 0;
  bool failed = false;
  std::string failure;
  double runtime_seconds = 0.0;

  std::vector<double> column(std::string_view estimator, bool se) const;
};

// Evaluates the users of cell 0 of scenario `index`. Deterministic in
// (spec.seed, index).
std::vector<UserRecord> evaluate_scenario(const ExperimentSpec& spec, const MlpModel* model,
                                          int index);

// All scenarios in parallel. A failing scenario stops the run; records of
// the scenarios before it are kept and the result is marked as failed.
ExperimentResult run_experiment(const ExperimentSpec& spec, const MlpModel* model = nullptr);

inline constexpr std::string_view kResultsSchema = "# dlgain-results v1";
std::string results_csv(const ExperimentResult& result);
void write_results_csv(const ExperimentResult& result, const std::filesystem::path& path);
ExperimentResult read_results_csv(const std::filesystem::path& path);

// Percentile table (5/25/50/75/95) of NMSE and SE per estimator.
std::string report_table(const ExperimentResult& result);

}  // namespace dlgain
