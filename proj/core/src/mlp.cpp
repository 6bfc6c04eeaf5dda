#include "dlgain/mlp.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "dlgain/error.hpp"

namespace dlgain {
namespace {

constexpr std::array<char, 4> kMagic = {'D', 'L', 'G', 'M'};
constexpr double kLogFloor = 1e-300;

double apply_transform(Transform t, double x) {
  return t == Transform::kLog ? std::log(std::max(x, kLogFloor)) : x;
}

double invert_transform(Transform t, double x) { return t == Transform::kLog ? std::exp(x) : x; }

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
std::uint64_t hash_value(std::uint64_t h, const T& v) {
  return fnv1a(h, &v, sizeof(T));
}

std::uint64_t hash_options(const TrainOptions& o, const MlpModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = hash_value(h, o.adam.learning_rate);
  h = hash_value(h, o.adam.beta1);
  h = hash_value(h, o.adam.beta2);
  h = hash_value(h, o.adam.epsilon);
  h = hash_value(h, o.batch_size);
  h = hash_value(h, o.epochs);
  h = hash_value(h, o.feature_transform);
  h = hash_value(h, o.label_transform);
  for (const auto& layer : model.layers) {
    const auto rows = layer.weights.rows();
    const auto cols = layer.weights.cols();
    h = hash_value(h, rows);
    h = hash_value(h, cols);
  }
  return h;
}

// Forward pass keeping pre-activations and activations for backprop.
struct Trace {
  std::vector<RowMatrix> activations;  // activations[0] is the input
  std::vector<RowMatrix> pre;
};

void forward_trace(const MlpModel& model, const RowMatrix& input, Trace& tr) {
  const std::size_t n_layers = model.layers.size();
  tr.activations.resize(n_layers + 1);
  tr.pre.resize(n_layers);
  tr.activations[0] = input;
  for (std::size_t i = 0; i < n_layers; ++i) {
    const DenseLayer& layer = model.layers[i];
    tr.pre[i].noalias() = tr.activations[i] * layer.weights.transpose();
    tr.pre[i].rowwise() += layer.biases.transpose();
    if (layer.activation == Activation::kRelu) {
      tr.activations[i + 1] = tr.pre[i].cwiseMax(0.0);
    } else {
      tr.activations[i + 1] = tr.pre[i];
    }
  }
}

Gradients zero_like(const MlpModel& model) {
  Gradients g;
  for (const auto& layer : model.layers) {
    g.weights.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(layer.biases.size()));
  }
  return g;
}

void check_input(const MlpModel& model, Eigen::Index cols) {
  if (!model.loaded()) throw Error(ErrorCode::kModelNotLoaded, "model has no layers");
  if (cols != model.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature dimension does not match the model");
  }
}

RowMatrix gather_rows(const RowMatrix& m, const std::vector<int>& idx, std::size_t begin,
                      std::size_t end) {
  RowMatrix out(static_cast<Eigen::Index>(end - begin), m.cols());
  for (std::size_t i = begin; i < end; ++i) out.row(static_cast<Eigen::Index>(i - begin)) = m.row(idx[i]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx, std::size_t begin,
                       std::size_t end) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) out(static_cast<Eigen::Index>(i - begin)) = v(idx[i]);
  return out;
}

double transformed_mae(const MlpModel& model, const RowMatrix& standardized,
                       const Eigen::VectorXd& targets) {
  return (network_forward(model, standardized) - targets).cwiseAbs().mean();
}

}  // namespace

std::vector<std::size_t> MlpModel::parameter_counts() const {
  std::vector<std::size_t> out;
  for (const auto& layer : layers) {
    out.push_back(static_cast<std::size_t>(layer.weights.size() + layer.biases.size()));
  }
  return out;
}

MlpModel make_mlp(const std::vector<int>& widths, Rng& rng) {
  if (widths.size() < 2) throw Error(ErrorCode::kConfigInvalid, "network needs input and output widths");
  for (int w : widths) {
    if (w < 1) throw Error(ErrorCode::kConfigInvalid, "layer widths must be positive");
  }
  MlpModel model;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int fan_in = widths[i];
    const int fan_out = widths[i + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    DenseLayer layer;
    layer.weights.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = uniform(rng, -limit, limit);
    }
    layer.biases = Eigen::VectorXd::Zero(fan_out);
    layer.activation = i + 2 == widths.size() ? Activation::kLinear : Activation::kRelu;
    model.layers.push_back(std::move(layer));
  }
  model.feature_transform.assign(widths.front(), Transform::kIdentity);
  model.feature_mean = Eigen::VectorXd::Zero(widths.front());
  model.feature_std = Eigen::VectorXd::Ones(widths.front());
  return model;
}

MlpModel make_default_mlp(Rng& rng) { return make_mlp({3, 32, 64, 64, 1}, rng); }

Eigen::VectorXd network_forward(const MlpModel& model, const RowMatrix& standardized) {
  check_input(model, standardized.cols());
  RowMatrix a = standardized;
  for (const auto& layer : model.layers) {
    RowMatrix z = a * layer.weights.transpose();
    z.rowwise() += layer.biases.transpose();
    if (layer.activation == Activation::kRelu) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  if (a.cols() != 1) throw Error(ErrorCode::kDimensionMismatch, "network output is not scalar");
  return a.col(0);
}

RowMatrix standardize_features(const MlpModel& model, const RowMatrix& features) {
  check_input(model, features.cols());
  RowMatrix out(features.rows(), features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    const Transform t = model.feature_transform[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
      out(r, c) = (apply_transform(t, features(r, c)) - model.feature_mean(c)) / model.feature_std(c);
    }
  }
  return out;
}

Eigen::VectorXd transform_labels(const MlpModel& model, const Eigen::VectorXd& labels) {
  Eigen::VectorXd out(labels.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    out(i) = (apply_transform(model.label_transform, labels(i)) - model.label_mean) / model.label_std;
  }
  return out;
}

Eigen::VectorXd forward(const MlpModel& model, const RowMatrix& features) {
  Eigen::VectorXd out = network_forward(model, standardize_features(model, features));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = invert_transform(model.label_transform, out(i) * model.label_std + model.label_mean);
  }
  return out;
}

double predict(const MlpModel& model, const Eigen::RowVectorXd& features) {
  RowMatrix m = features;
  return forward(model, m)(0);
}

double loss_and_gradient(const MlpModel& model, const RowMatrix& inputs,
                         const Eigen::VectorXd& targets, Gradients& grad) {
  check_input(model, inputs.cols());
  if (inputs.rows() != targets.size() || inputs.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "inputs and targets differ in length");
  }
  Trace tr;
  forward_trace(model, inputs, tr);
  const double n = static_cast<double>(inputs.rows());
  const Eigen::VectorXd diff = tr.activations.back().col(0) - targets;
  const double loss = diff.cwiseAbs().mean();

  if (grad.weights.size() != model.layers.size()) grad = zero_like(model);
  RowMatrix delta = diff.unaryExpr([n](double d) { return (d > 0.0) - (d < 0.0) + 0.0; }) / n;
  for (std::size_t i = model.layers.size(); i-- > 0;) {
    const DenseLayer& layer = model.layers[i];
    if (layer.activation == Activation::kRelu) {
      delta = delta.cwiseProduct((tr.pre[i].array() > 0.0).cast<double>().matrix());
    }
    grad.weights[i].noalias() = delta.transpose() * tr.activations[i];
    grad.biases[i] = delta.colwise().sum().transpose();
    if (i > 0) {
      RowMatrix next = delta * layer.weights;
      delta = std::move(next);
    }
  }
  return loss;
}

Adam::Adam(const MlpModel& model, AdamOptions options)
    : opt_(options), m_(zero_like(model)), v_(zero_like(model)) {}

void Adam::step(MlpModel& model, const Gradients& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(opt_.beta1, t_);
  const double c2 = 1.0 - std::pow(opt_.beta2, t_);
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = opt_.beta1 * m + (1.0 - opt_.beta1) * g;
    v = opt_.beta2 * v + (1.0 - opt_.beta2) * g.cwiseAbs2();
    param.array() -= opt_.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + opt_.epsilon);
  };
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    update(model.layers[i].weights, grad.weights[i], m_.weights[i], v_.weights[i]);
    update(model.layers[i].biases, grad.biases[i], m_.biases[i], v_.biases[i]);
  }
}

MlpModel train(MlpModel model, const DataSplit& training, const DataSplit& validation,
               const TrainOptions& options, Rng& rng) {
  const Eigen::Index n = training.features.rows();
  const Eigen::Index p = training.features.cols();
  check_input(model, p);
  if (n == 0 || training.labels.size() != n || validation.features.rows() == 0 ||
      validation.labels.size() != validation.features.rows()) {
    throw Error(ErrorCode::kEmptySample, "training and validation splits must be non-empty");
  }
  if (options.batch_size < 1 || options.epochs < 1) {
    throw Error(ErrorCode::kConfigInvalid, "batch size and epochs must be positive");
  }

  // Standardization statistics from the training split only.
  model.feature_transform.assign(static_cast<std::size_t>(p), options.feature_transform);
  model.label_transform = options.label_transform;
  model.feature_mean.resize(p);
  model.feature_std.resize(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    const Eigen::VectorXd col = training.features.col(c).unaryExpr(
        [&](double x) { return apply_transform(options.feature_transform, x); });
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    model.feature_mean(c) = mean;
    model.feature_std(c) = sd > 0.0 ? sd : 1.0;
  }
  {
    const Eigen::VectorXd y = training.labels.unaryExpr(
        [&](double x) { return apply_transform(options.label_transform, x); });
    model.label_mean = y.mean();
    const double sd = std::sqrt((y.array() - model.label_mean).square().mean());
    model.label_std = sd > 0.0 ? sd : 1.0;
  }

  const RowMatrix x_train = standardize_features(model, training.features);
  const Eigen::VectorXd y_train = transform_labels(model, training.labels);
  const RowMatrix x_val = standardize_features(model, validation.features);
  const Eigen::VectorXd y_val = transform_labels(model, validation.labels);

  TrainingMetadata meta;
  meta.config_hash = hash_options(options, model);
  meta.epochs = options.epochs;
  meta.best_validation_mae = std::numeric_limits<double>::infinity();
  MlpModel best = model;

  Adam adam(model, options.adam);
  Gradients grad;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(options.batch_size);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      const RowMatrix xb = gather_rows(x_train, order, begin, end);
      const Eigen::VectorXd yb = gather(y_train, order, begin, end);
      const double loss = loss_and_gradient(model, xb, yb, grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kDiverged, "training loss is not finite; lower the learning rate");
      }
      loss_sum += loss * static_cast<double>(end - begin);
      adam.step(model, grad);
    }
    const double val = transformed_mae(model, x_val, y_val);
    if (!std::isfinite(val)) {
      throw Error(ErrorCode::kDiverged, "validation loss is not finite; lower the learning rate");
    }
    meta.train_mae.push_back(loss_sum / static_cast<double>(n));
    meta.validation_mae.push_back(val);
    if (val < meta.best_validation_mae) {
      meta.best_validation_mae = val;
      meta.best_epoch = epoch;
      best.layers = model.layers;
    }
  }
  best.feature_transform = model.feature_transform;
  best.feature_mean = model.feature_mean;
  best.feature_std = model.feature_std;
  best.label_transform = model.label_transform;
  best.label_mean = model.label_mean;
  best.label_std = model.label_std;
  best.metadata = std::move(meta);
  return best;
}

double mean_absolute_error(const MlpModel& model, const DataSplit& data) {
  if (data.features.rows() == 0) throw Error(ErrorCode::kEmptySample, "empty data split");
  return (forward(model, data.features) - data.labels).cwiseAbs().mean();
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

static_assert(std::endian::native == std::endian::little, "model files are little-endian");

class Writer {
 public:
  explicit Writer(std::ofstream& os) : os_(os) {}
  template <typename T>
  void pod(const T& v) { os_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }
  void doubles(const double* p, std::size_t n) {
    os_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  }
  void vec(const std::vector<double>& v) {
    pod<std::uint64_t>(v.size());
    doubles(v.data(), v.size());
  }

 private:
  std::ofstream& os_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  template <typename T>
  T pod() {
    T v;
    take(&v, sizeof(T));
    return v;
  }
  void doubles(double* p, std::size_t n) { take(p, n * sizeof(double)); }
  std::vector<double> vec() {
    const auto n = pod<std::uint64_t>();
    if (n > remaining() / sizeof(double)) throw corrupt();
    std::vector<double> v(n);
    doubles(v.data(), n);
    return v;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  static Error corrupt() { return Error(ErrorCode::kCorruptFile, "model file is truncated or malformed"); }

 private:
  void take(void* dst, std::size_t n) {
    if (n > remaining()) throw corrupt();
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }
  std::string data_;
  std::size_t pos_ = 0;
};

constexpr std::uint32_t kMaxDim = 1u << 16;

}  // namespace

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  if (!model.loaded()) throw Error(ErrorCode::kModelNotLoaded, "nothing to save");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  Writer w(os);
  os.write(kMagic.data(), kMagic.size());
  w.pod(kModelFormatVersion);
  const auto p = static_cast<std::uint32_t>(model.input_dim());
  w.pod(p);
  for (std::uint32_t c = 0; c < p; ++c) w.pod(static_cast<std::uint8_t>(model.feature_transform[c]));
  w.doubles(model.feature_mean.data(), p);
  w.doubles(model.feature_std.data(), p);
  w.pod(static_cast<std::uint8_t>(model.label_transform));
  w.pod(model.label_mean);
  w.pod(model.label_std);
  w.pod(static_cast<std::uint32_t>(model.layers.size()));
  for (const auto& layer : model.layers) {
    w.pod(static_cast<std::uint32_t>(layer.weights.rows()));
    w.pod(static_cast<std::uint32_t>(layer.weights.cols()));
    w.pod(static_cast<std::uint8_t>(layer.activation));
    // Column-major, matching Eigen's default storage.
    w.doubles(layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
    w.doubles(layer.biases.data(), static_cast<std::size_t>(layer.biases.size()));
  }
  const auto& m = model.metadata;
  w.pod(m.config_hash);
  w.pod(static_cast<std::int32_t>(m.epochs));
  w.pod(static_cast<std::int32_t>(m.best_epoch));
  w.pod(m.best_validation_mae);
  w.vec(m.train_mae);
  w.vec(m.validation_mae);
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  Reader r(std::move(data));

  std::array<char, 4> magic{};
  for (char& c : magic) c = r.pod<char>();
  if (magic != kMagic) throw Error(ErrorCode::kCorruptFile, "not a model file");
  const auto version = r.pod<std::uint8_t>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kFormatVersionMismatch,
                "model format version " + std::to_string(version) + ", expected " +
                    std::to_string(kModelFormatVersion));
  }

  MlpModel model;
  const auto p = r.pod<std::uint32_t>();
  if (p == 0 || p > kMaxDim) throw Reader::corrupt();
  for (std::uint32_t c = 0; c < p; ++c) {
    const auto t = r.pod<std::uint8_t>();
    if (t > 1) throw Reader::corrupt();
    model.feature_transform.push_back(static_cast<Transform>(t));
  }
  model.feature_mean.resize(p);
  model.feature_std.resize(p);
  r.doubles(model.feature_mean.data(), p);
  r.doubles(model.feature_std.data(), p);
  const auto lt = r.pod<std::uint8_t>();
  if (lt > 1) throw Reader::corrupt();
  model.label_transform = static_cast<Transform>(lt);
  model.label_mean = r.pod<double>();
  model.label_std = r.pod<double>();

  const auto n_layers = r.pod<std::uint32_t>();
  if (n_layers == 0 || n_layers > 1024) throw Reader::corrupt();
  std::uint32_t expected_in = p;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const auto rows = r.pod<std::uint32_t>();
    const auto cols = r.pod<std::uint32_t>();
    const auto act = r.pod<std::uint8_t>();
    if (rows == 0 || rows > kMaxDim || cols != expected_in || act > 1) throw Reader::corrupt();
    DenseLayer layer;
    layer.weights.resize(rows, cols);
    layer.biases.resize(rows);
    layer.activation = static_cast<Activation>(act);
    r.doubles(layer.weights.data(), static_cast<std::size_t>(rows) * cols);
    r.doubles(layer.biases.data(), rows);
    model.layers.push_back(std::move(layer));
    expected_in = rows;
  }
  auto& m = model.metadata;
  m.config_hash = r.pod<std::uint64_t>();
  m.epochs = r.pod<std::int32_t>();
  m.best_epoch = r.pod<std::int32_t>();
  m.best_validation_mae = r.pod<double>();
  m.train_mae = r.vec();
  m.validation_mae = r.vec();
  if (r.remaining() != 0) throw Reader::corrupt();
  return model;
}

}  // namespace dlgain
