#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "dlgain/random.hpp"

namespace dlgain {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation : std::uint8_t { kRelu = 0, kLinear = 1 };

struct DenseLayer {
  // out x in.
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
  Activation activation = Activation::kRelu;
};

// Elementwise map applied before standardization.
enum class Transform : std::uint8_t { kIdentity = 0, kLog = 1 };

struct TrainingMetadata {
  std::uint64_t config_hash = 0;
  int epochs = 0;
  int best_epoch = -1;
  double best_validation_mae = 0.0;
  std::vector<double> train_mae;
  std::vector<double> validation_mae;
};

struct MlpModel {
  std::vector<DenseLayer> layers;
  std::vector<Transform> feature_transform;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_std;
  Transform label_transform = Transform::kIdentity;
  double label_mean = 0.0;
  double label_std = 1.0;
  TrainingMetadata metadata;

  bool loaded() const { return !layers.empty(); }
  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols()); }
  std::vector<std::size_t> parameter_counts() const;
};

// widths = {in, hidden..., out}. Hidden layers use ReLU and the last layer is
// linear. Weights ~ U(+-sqrt(6 / (fan_in + fan_out))), biases zero. Feature
// and label transforms default to identity with zero mean and unit scale.
MlpModel make_mlp(const std::vector<int>& widths, Rng& rng);

// Default layout 3 -> 32 -> 64 -> 64 -> 1.
MlpModel make_default_mlp(Rng& rng);

// Network only: rows of already standardized inputs to raw outputs.
Eigen::VectorXd network_forward(const MlpModel& model, const RowMatrix& standardized);

// Full pipeline on raw features (one row per sample): transform,
// standardize, network, undo the label scaling and transform.
Eigen::VectorXd forward(const MlpModel& model, const RowMatrix& features);
double predict(const MlpModel& model, const Eigen::RowVectorXd& features);

RowMatrix standardize_features(const MlpModel& model, const RowMatrix& features);
Eigen::VectorXd transform_labels(const MlpModel& model, const Eigen::VectorXd& labels);

// Gradients in the same shape as the layers.
struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Mean absolute error of the network on standardized inputs against
// transformed targets, with its gradient.
double loss_and_gradient(const MlpModel& model, const RowMatrix& inputs,
                         const Eigen::VectorXd& targets, Gradients& grad);

struct AdamOptions {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(const MlpModel& model, AdamOptions options);
  void step(MlpModel& model, const Gradients& grad);
  int steps() const { return t_; }

 private:
  AdamOptions opt_;
  int t_ = 0;
  Gradients m_;
  Gradients v_;
};

struct TrainOptions {
  AdamOptions adam;
  int batch_size = 128;
  int epochs = 200;
  Transform feature_transform = Transform::kLog;
  Transform label_transform = Transform::kLog;
};

struct DataSplit {
  RowMatrix features;
  Eigen::VectorXd labels;
};

// Mini-batch Adam on MAE with a full reshuffle per epoch. Standardization is
// fitted on the training split. Returns the parameters with the lowest
// validation MAE. Throws kDiverged on a non-finite loss.
MlpModel train(MlpModel model, const DataSplit& training, const DataSplit& validation,
               const TrainOptions& options, Rng& rng);

// MAE of forward() against raw labels.
double mean_absolute_error(const MlpModel& model, const DataSplit& data);

// Binary format: magic, version byte, transforms, statistics, layer shapes
// and parameters, metadata. Doubles are stored bit-exactly.
inline constexpr std::uint8_t kModelFormatVersion = 1;
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace dlgain
