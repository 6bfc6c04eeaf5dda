#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "dlgain/error.hpp"
#include "dlgain/mlp.hpp"

using namespace dlgain;
namespace fs = std::filesystem;

namespace {

RowMatrix random_rows(int n, int p, Rng& rng) {
  RowMatrix x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = standard_normal(rng);
  }
  return x;
}

double total_loss(const MlpModel& m, const RowMatrix& x, const Eigen::VectorXd& y) {
  Gradients g;
  return loss_and_gradient(m, x, y, g);
}

fs::path temp_file(const char* name) { return fs::temp_directory_path() / name; }

ErrorCode load_error(const fs::path& p) {
  try {
    load_model(p);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

}  // namespace

TEST_SUITE("mlp") {
  TEST_CASE("default layout and parameter counts") {
    Rng rng(1);
    const MlpModel m = make_default_mlp(rng);
    CHECK(m.input_dim() == 3);
    CHECK(m.parameter_counts() == std::vector<std::size_t>{128, 2112, 4160, 65});
    CHECK(m.layers.back().activation == Activation::kLinear);
    for (std::size_t i = 0; i + 1 < m.layers.size(); ++i) CHECK(m.layers[i].activation == Activation::kRelu);
  }

  TEST_CASE("zero network outputs zero and a linear unit computes w x + b") {
    Rng rng(2);
    MlpModel z = make_mlp({3, 5, 1}, rng);
    for (auto& l : z.layers) {
      l.weights.setZero();
      l.biases.setZero();
    }
    CHECK(predict(z, Eigen::RowVector3d(1.0, -2.0, 3.0)) == 0.0);

    MlpModel lin = make_mlp({1, 1}, rng);
    lin.layers[0].weights(0, 0) = 2.0;
    lin.layers[0].biases(0) = 1.0;
    CHECK(predict(lin, Eigen::RowVectorXd::Constant(1, 3.0)) == doctest::Approx(7.0));
    CHECK_THROWS_AS(predict(lin, Eigen::RowVector2d(1.0, 2.0)), Error);
  }

  TEST_CASE("forward pass equals an explicit loop evaluation") {
    Rng rng(3);
    MlpModel m = make_mlp({3, 6, 5, 1}, rng);
    for (auto& l : m.layers) {
      for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases(i) = 0.1 * standard_normal(rng);
    }
    const RowMatrix x = random_rows(10, 3, rng);
    const Eigen::VectorXd got = network_forward(m, x);
    for (int r = 0; r < 10; ++r) {
      std::vector<double> a(x.row(r).data(), x.row(r).data() + 3);
      for (const auto& l : m.layers) {
        std::vector<double> z(static_cast<std::size_t>(l.weights.rows()));
        for (Eigen::Index o = 0; o < l.weights.rows(); ++o) {
          double s = l.biases(o);
          for (Eigen::Index i = 0; i < l.weights.cols(); ++i) s += l.weights(o, i) * a[i];
          z[o] = l.activation == Activation::kRelu ? std::max(0.0, s) : s;
        }
        a = z;
      }
      CHECK(got(r) == doctest::Approx(a[0]).epsilon(1e-13));
    }
  }

  TEST_CASE("standardization statistics can be folded into the first layer") {
    Rng rng(4);
    MlpModel m = make_mlp({3, 4, 1}, rng);
    m.feature_transform.assign(3, Transform::kIdentity);
    m.feature_mean = Eigen::Vector3d(1.0, -2.0, 0.5);
    m.feature_std = Eigen::Vector3d(2.0, 0.5, 3.0);
    MlpModel folded = m;
    auto& w = folded.layers[0].weights;
    folded.layers[0].biases -= w * m.feature_mean.cwiseQuotient(m.feature_std);
    for (int c = 0; c < 3; ++c) w.col(c) /= m.feature_std(c);
    folded.feature_mean.setZero();
    folded.feature_std.setOnes();
    const RowMatrix x = random_rows(20, 3, rng);
    const Eigen::VectorXd a = forward(m, x);
    const Eigen::VectorXd b = forward(folded, x);
    for (int i = 0; i < 20; ++i) CHECK(a(i) == doctest::Approx(b(i)).epsilon(1e-12));
  }

  TEST_CASE("backpropagation matches central finite differences") {
    Rng rng(5);
    MlpModel m = make_mlp({3, 4, 1}, rng);
    for (auto& l : m.layers) {
      for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases(i) = 0.3 * standard_normal(rng);
    }
    const RowMatrix x = random_rows(16, 3, rng);
    Eigen::VectorXd y(16);
    for (int i = 0; i < 16; ++i) y(i) = 3.0 * standard_normal(rng);
    Gradients g;
    loss_and_gradient(m, x, y, g);
    const double h = 1e-5;
    int compared = 0;
    for (std::size_t li = 0; li < m.layers.size(); ++li) {
      auto check = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + h;
        const double up = total_loss(m, x, y);
        param = keep - h;
        const double down = total_loss(m, x, y);
        param = keep;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        CHECK(std::abs(numeric - analytic) / scale < 1e-4);
        ++compared;
      };
      auto& layer = m.layers[li];
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) check(layer.weights(r, c), g.weights[li](r, c));
        check(layer.biases(r), g.biases[li](r));
      }
    }
    CHECK(compared == 21);
  }

  TEST_CASE("one Adam step from zero moments moves by the learning rate") {
    Rng rng(6);
    MlpModel m = make_mlp({1, 1}, rng);
    m.layers[0].weights(0, 0) = 0.4;
    m.layers[0].biases(0) = -0.2;
    Gradients g;
    g.weights = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    g.biases = {Eigen::VectorXd::Constant(1, -1.0)};
    AdamOptions opt;
    Adam adam(m, opt);
    adam.step(m, g);
    CHECK(m.layers[0].weights(0, 0) == doctest::Approx(0.4 - opt.learning_rate / (1.0 + opt.epsilon)).epsilon(1e-14));
    CHECK(m.layers[0].biases(0) == doctest::Approx(-0.2 + opt.learning_rate / (1.0 + opt.epsilon)).epsilon(1e-14));
    CHECK(adam.steps() == 1);
  }

  TEST_CASE("training fits a linear target and is reproducible") {
    Rng data_rng(7);
    auto make = [&](int n) {
      DataSplit d;
      d.features = RowMatrix::Zero(n, 3);
      d.labels.resize(n);
      for (int i = 0; i < n; ++i) {
        d.features(i, 0) = standard_normal(data_rng);
        d.labels(i) = 2.0 * d.features(i, 0) + 1.0;
      }
      return d;
    };
    const DataSplit tr = make(10000);
    const DataSplit va = make(2000);
    TrainOptions opt;
    opt.epochs = 30;
    opt.feature_transform = Transform::kIdentity;
    opt.label_transform = Transform::kIdentity;
    Rng a(8), b(8);
    Rng init(9);
    const MlpModel start = make_mlp({3, 32, 64, 64, 1}, init);
    const MlpModel m1 = train(start, tr, va, opt, a);
    const MlpModel m2 = train(start, tr, va, opt, b);
    const double sd = std::sqrt((va.labels.array() - va.labels.mean()).square().mean());
    CHECK(mean_absolute_error(m1, va) < 0.05 * sd);
    for (std::size_t i = 0; i < m1.layers.size(); ++i) {
      CHECK(m1.layers[i].weights == m2.layers[i].weights);
      CHECK(m1.layers[i].biases == m2.layers[i].biases);
    }
    const auto& hist = m1.metadata.train_mae;
    REQUIRE(hist.size() == 30);
    auto window_median = [&](std::size_t begin) {
      std::vector<double> w(hist.begin() + static_cast<std::ptrdiff_t>(begin),
                            hist.begin() + static_cast<std::ptrdiff_t>(begin + 5));
      std::nth_element(w.begin(), w.begin() + 2, w.end());
      return w[2];
    };
    CHECK(window_median(25) < hist.front());
    CHECK(window_median(25) <= window_median(0));
    CHECK(m1.metadata.best_epoch >= 0);
  }

  TEST_CASE("a non-finite loss reports divergence") {
    Rng rng(10);
    DataSplit d;
    d.features = random_rows(64, 3, rng);
    d.labels = Eigen::VectorXd::Constant(64, 1.0);
    d.labels(3) = std::numeric_limits<double>::infinity();
    TrainOptions opt;
    opt.epochs = 2;
    opt.label_transform = Transform::kIdentity;
    opt.feature_transform = Transform::kIdentity;
    try {
      train(make_default_mlp(rng), d, d, opt, rng);
      FAIL("expected Diverged");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDiverged);
    }
  }

  TEST_CASE("model files round-trip and reject damage") {
    Rng rng(11);
    MlpModel m = make_default_mlp(rng);
    m.feature_transform = {Transform::kLog, Transform::kLog, Transform::kIdentity};
    m.feature_mean = Eigen::Vector3d(0.1, 0.2, 0.3);
    m.feature_std = Eigen::Vector3d(1.5, 2.5, 3.5);
    m.label_transform = Transform::kLog;
    m.label_mean = -3.0;
    m.label_std = 0.25;
    m.metadata.train_mae = {1.0, 0.5};
    m.metadata.validation_mae = {1.1, 0.6};
    m.metadata.best_epoch = 1;
    const fs::path p = temp_file("dlgain_unit_model.dlgm");
    save_model(m, p);
    const MlpModel back = load_model(p);
    const RowMatrix x = random_rows(8, 3, rng).cwiseAbs();
    CHECK(forward(back, x) == forward(m, x));
    CHECK(back.feature_std == m.feature_std);
    CHECK(back.metadata.validation_mae == m.metadata.validation_mae);

    std::string bytes;
    {
      std::ifstream in(p, std::ios::binary);
      bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    const fs::path cut = temp_file("dlgain_unit_cut.dlgm");
    {
      std::ofstream out(cut, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK(load_error(cut) == ErrorCode::kCorruptFile);

    std::string bad_version = bytes;
    bad_version[4] = static_cast<char>(kModelFormatVersion + 1);
    const fs::path ver = temp_file("dlgain_unit_ver.dlgm");
    {
      std::ofstream out(ver, std::ios::binary);
      out.write(bad_version.data(), static_cast<std::streamsize>(bad_version.size()));
    }
    CHECK(load_error(ver) == ErrorCode::kFormatVersionMismatch);
    fs::remove(p);
    fs::remove(cut);
    fs::remove(ver);
  }
}
