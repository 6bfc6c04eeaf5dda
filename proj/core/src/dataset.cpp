#include "dlgain/dataset.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dlgain/block.hpp"
#include "dlgain/error.hpp"
#include "dlgain/estimators.hpp"
#include "dlgain/parallel.hpp"

namespace dlgain {
namespace {

constexpr const char* kHeader = "xi_loo,t,eta_rho_beta,label,group,hardening_mean,split";

std::vector<int> rows_with(const std::vector<SplitTag>& split, SplitTag tag) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == tag) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

}  // namespace

DataSplit Dataset::subset(SplitTag tag) const {
  const std::vector<int> rows = rows_with(split, tag);
  DataSplit out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    out.labels(static_cast<Eigen::Index>(i)) = labels(rows[i]);
  }
  return out;
}

Eigen::VectorXd Dataset::hardening_subset(SplitTag tag) const {
  const std::vector<int> rows = rows_with(split, tag);
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = hardening_mean(rows[i]);
  return out;
}

void assign_splits(Dataset& data, double train_fraction, double validation_fraction, Rng& rng) {
  if (train_fraction <= 0.0 || validation_fraction <= 0.0 ||
      train_fraction + validation_fraction >= 1.0) {
    throw Error(ErrorCode::kConfigInvalid, "split fractions must be positive and sum below one");
  }
  const auto n = static_cast<std::size_t>(data.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));
  data.split.assign(n, SplitTag::kTest);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train) {
      data.split[order[i]] = SplitTag::kTrain;
    } else if (i < n_train + n_val) {
      data.split[order[i]] = SplitTag::kValidation;
    }
  }
}

Dataset generate_dataset(const NetworkConfig& cfg, int n_large_scale, int n_small_scale,
                         const DatasetOptions& options, std::uint64_t seed) {
  if (n_large_scale < 1 || n_small_scale < 1) {
    throw Error(ErrorCode::kConfigInvalid, "dataset counts must be positive");
  }
  cfg.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(n_large_scale) * n_small_scale;
  Dataset data;
  data.features.resize(n, 3);
  data.labels.resize(n);
  data.group.resize(static_cast<std::size_t>(n));
  data.hardening_mean.resize(n);
  const int tau_d = cfg.data_length();

  parallel_for(n_large_scale, options.threads, [&](int g) {
    Rng setup = make_stream(seed, static_cast<std::uint64_t>(g), 0, stream::kSetup);
    const Scenario s = build_scenario(cfg, setup);
    const UplinkStatistics stats = precompute_statistics(s);
    Rng norm_rng = make_stream(seed, static_cast<std::uint64_t>(g), 0, stream::kNormConstants);
    const PrecodingPlan plan = make_precoding_plan(s, stats, options.precoder, norm_rng);
    Rng t_rng = make_stream(seed, static_cast<std::uint64_t>(g), 0, stream::kInterference);
    const InterferenceConstant t = interference_constant(s, stats, plan, options.mc_blocks, t_rng);
    const int u = s.layout().user(0, 0);
    const double eta = s.eta(0, 0);
    const double erb = eta * s.downlink_power() * s.beta(0, 0, 0);
    const double mean = hardening_mean(s, plan, u);
    const DownlinkOptions dl{.receivers = {u}};
    ChannelBlock block;
    for (int j = 0; j < n_small_scale; ++j) {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(j) + 1,
                            stream::kBlock);
      generate_block(s, stats, plan, rng, block);
      const BlockObservation obs =
          simulate_block(block.gains, s.eta(), s.config().noise_power_dl, tau_d, rng, dl);
      const Eigen::Index row = static_cast<Eigen::Index>(g) * n_small_scale + j;
      data.features(row, 0) = obs.xi_loo[u];
      data.features(row, 1) = t[u];
      data.features(row, 2) = erb;
      data.labels(row) = std::abs(block.gains.alpha(u, u));
      data.group[static_cast<std::size_t>(row)] = g;
      data.hardening_mean(row) = mean;
    }
  });

  Rng split_rng = make_stream(seed, 0, 0, stream::kSplit);
  assign_splits(data, options.train_fraction, options.validation_fraction, split_rng);
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  os << kHeader << '\n';
  char buf[256];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d\n", data.features(i, 0),
                  data.features(i, 1), data.features(i, 2), data.labels(i),
                  data.group[static_cast<std::size_t>(i)], data.hardening_mean(i),
                  static_cast<int>(data.split[static_cast<std::size_t>(i)]));
    os << buf;
  }
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kHeader) {
    throw Error(ErrorCode::kCorruptFile, "unexpected dataset header in " + path.string());
  }
  std::vector<std::array<double, 7>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 7> r{};
    std::istringstream ss(line);
    std::string field;
    for (double& v : r) {
      if (!std::getline(ss, field, ',')) throw Error(ErrorCode::kCorruptFile, "short dataset row");
      try {
        v = std::stod(field);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kCorruptFile, "bad number '" + field + "'");
      }
    }
    if (r[6] < 0 || r[6] > 2) throw Error(ErrorCode::kCorruptFile, "bad split tag");
    rows.push_back(r);
  }
  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.features.resize(n, 3);
  data.labels.resize(n);
  data.hardening_mean.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    data.features.row(i) << r[0], r[1], r[2];
    data.labels(i) = r[3];
    data.group.push_back(static_cast<int>(r[4]));
    data.hardening_mean(i) = r[5];
    data.split.push_back(static_cast<SplitTag>(static_cast<int>(r[6])));
  }
  return data;
}

MlpModel fit_default_model(const Dataset& data, const TrainOptions& options, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0, 0, stream::kTraining);
  MlpModel model = make_default_mlp(rng);
  return train(std::move(model), data.subset(SplitTag::kTrain), data.subset(SplitTag::kValidation),
               options, rng);
}

ModelEvaluation evaluate_model(const MlpModel& model, const Dataset& data, SplitTag tag) {
  const DataSplit split = data.subset(tag);
  if (split.labels.size() == 0) throw Error(ErrorCode::kEmptySample, "split has no rows");
  ModelEvaluation out;
  out.samples = split.labels.size();
  out.model_mae = mean_absolute_error(model, split);
  out.hardening_mae = (data.hardening_subset(tag) - split.labels).cwiseAbs().mean();
  return out;
}

}  // namespace dlgain
