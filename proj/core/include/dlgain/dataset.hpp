#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dlgain/mlp.hpp"
#include "dlgain/precoding.hpp"

namespace dlgain {

enum class SplitTag : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

// Rows are (xi', T, eta rho beta) -> |alpha| for the typical user (0, 0).
struct Dataset {
  RowMatrix features;  // N x 3
  Eigen::VectorXd labels;
  // Large-scale draw each row came from.
  std::vector<int> group;
  // E{alpha} of the row's large-scale draw (the hardening-mean predictor).
  Eigen::VectorXd hardening_mean;
  std::vector<SplitTag> split;

  Eigen::Index size() const { return features.rows(); }
  DataSplit subset(SplitTag tag) const;
  Eigen::VectorXd hardening_subset(SplitTag tag) const;
};

struct DatasetOptions {
  PrecoderOptions precoder;
  // Blocks used for T when no closed form applies.
  int mc_blocks = 2000;
  double train_fraction = 0.4;
  double validation_fraction = 0.1;
  int threads = 1;
};

// For each large-scale draw a fresh network is dropped and user (0, 0) is
// the typical user; each small-scale draw runs uplink training, precoding
// and one downlink block. Rows are assigned to splits by a seeded shuffle.
Dataset generate_dataset(const NetworkConfig& cfg, int n_large_scale, int n_small_scale,
                         const DatasetOptions& options, std::uint64_t seed);

void assign_splits(Dataset& data, double train_fraction, double validation_fraction, Rng& rng);

// Columnar text with a header: xi_loo,t,eta_rho_beta,label,group,hardening_mean,split
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

// Default-layout model trained on the train/validation splits. Initialization
// and shuffling draw from the kTraining stream of `seed`.
MlpModel fit_default_model(const Dataset& data, const TrainOptions& options, std::uint64_t seed);

struct ModelEvaluation {
  Eigen::Index samples = 0;
  double model_mae = 0.0;
  // MAE of predicting E{alpha} of the row's large-scale draw.
  double hardening_mae = 0.0;
};

ModelEvaluation evaluate_model(const MlpModel& model, const Dataset& data,
                               SplitTag tag = SplitTag::kTest);

}  // namespace dlgain
