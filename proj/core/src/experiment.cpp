#include "dlgain/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "config_json.hpp"
#include "dlgain/block.hpp"
#include "dlgain/error.hpp"
#include "dlgain/estimators.hpp"
#include "dlgain/parallel.hpp"

namespace dlgain {
namespace {

constexpr const char* kCsvHeader =
    "scenario_id,cell,user,estimator,nmse,se_bits,branch_fraction_blind";
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
// |alpha_bar| below this fraction of sqrt(rho beta) counts as vanishing.
constexpr double kRejectScale = 1e-12;

const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names = {"hardening", "model_aided", "oracle", "neural"};
  return names;
}

Transform parse_transform(const std::string& s) {
  if (s == "identity") return Transform::kIdentity;
  if (s == "log") return Transform::kLog;
  throw Error(ErrorCode::kConfigInvalid, "unknown transform '" + s + "'");
}

// Streaming NMSE numerator and denominator.
struct NmseAcc {
  double err = 0.0;
  double power = 0.0;
  void add(double estimate, Complex truth) {
    err += std::norm(Complex(estimate) - truth);
    power += std::norm(truth);
  }
  double value() const { return err / power; }
};

struct Variant {
  std::string name;
  NmseAcc nmse;
  SeMoments moments;
  long long blind = 0;
  long long total = 0;
};

double se_or_nan(const SeMoments& m, const Scenario& s) {
  try {
    return se_equalized(m, s.eta(), s.config().noise_power_dl, s.config().pilot_length(),
                        s.config().coherence_length);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateMoments) throw;
    return kNan;
  }
}

}  // namespace

bool ExperimentSpec::wants(std::string_view estimator) const {
  return std::find(estimators.begin(), estimators.end(), estimator) != estimators.end();
}

void ExperimentSpec::validate() const {
  network.validate();
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigInvalid, msg); };
  if (n_scenarios < 1 || n_blocks < 1) fail("n_scenarios and n_blocks must be positive");
  if (!(theta_factor >= 1.0)) fail("theta_factor must be >= 1");
  if (threads < 1) fail("threads must be positive");
  if (mc_blocks < 1000) fail("mc_blocks must be >= 1000");
  if (zf_norm_draws < 1) fail("zf_norm_draws must be positive");
  if (n_large_scale < 1 || n_small_scale < 1) fail("dataset counts must be positive");
  if (estimators.empty() && !perfect_csi) fail("no estimators requested");
  for (const auto& e : estimators) {
    if (std::find(known_estimators().begin(), known_estimators().end(), e) ==
        known_estimators().end()) {
      fail("unknown estimator '" + e + "'");
    }
  }
  if (wants(kEstNeural) && !model_path) fail("neural estimator requested without model_path");
  if (scheme == Scheme::kZf && network.num_antennas <= network.users_per_cell) {
    fail("zero-forcing needs num_antennas > users_per_cell");
  }
}

ExperimentSpec parse_experiment_spec(std::string_view json_text) {
  const auto j = detail::parse_json_object(json_text);
  ExperimentSpec spec;
  std::set<std::string> consumed;
  detail::apply_network_keys(j, spec.network, consumed);
  auto get = [&](const char* key, auto& out) {
    if (!j.contains(key)) return false;
    consumed.insert(key);
    try {
      j.at(key).get_to(out);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kConfigInvalid, std::string("bad value for '") + key + "'");
    }
    return true;
  };
  std::string text;
  if (get("scheme", text)) spec.scheme = parse_scheme(text);
  get("estimators", spec.estimators);
  get("perfect_csi", spec.perfect_csi);
  get("n_scenarios", spec.n_scenarios);
  get("n_blocks", spec.n_blocks);
  get("seed", spec.seed);
  get("theta_factor", spec.theta_factor);
  if (get("model_path", text)) spec.model_path = text;
  get("threads", spec.threads);
  get("mc_blocks", spec.mc_blocks);
  get("zf_norm_draws", spec.zf_norm_draws);
  get("n_large_scale", spec.n_large_scale);
  get("n_small_scale", spec.n_small_scale);
  get("epochs", spec.training.epochs);
  get("batch_size", spec.training.batch_size);
  get("learning_rate", spec.training.adam.learning_rate);
  if (get("feature_transform", text)) spec.training.feature_transform = parse_transform(text);
  if (get("label_transform", text)) spec.training.label_transform = parse_transform(text);
  detail::reject_unknown_keys(j, consumed);
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  return parse_experiment_spec(detail::read_text_file(path));
}

std::vector<UserRecord> evaluate_scenario(const ExperimentSpec& spec, const MlpModel* model,
                                          int index) {
  const auto idx = static_cast<std::uint64_t>(index);
  if (spec.wants(kEstNeural) && (model == nullptr || !model->loaded())) {
    throw Error(ErrorCode::kModelNotLoaded, "neural estimator needs a loaded model");
  }

  Rng setup = make_stream(spec.seed, idx, 0, stream::kSetup);
  const Scenario s = build_scenario(spec.network, setup);
  const UplinkStatistics stats = precompute_statistics(s);
  PrecoderOptions popts;
  popts.scheme = spec.scheme;
  popts.zf_norm = s.iid() ? ZfNormMode::kAnalyticIid : ZfNormMode::kMonteCarlo;
  popts.zf_norm_draws = spec.zf_norm_draws;
  Rng norm_rng = make_stream(spec.seed, idx, 0, stream::kNormConstants);
  const PrecodingPlan plan = make_precoding_plan(s, stats, popts, norm_rng);
  Rng t_rng = make_stream(spec.seed, idx, 0, stream::kInterference);
  const InterferenceConstant t = interference_constant(s, stats, plan, spec.mc_blocks, t_rng);

  const int k_users = s.users();
  const int n_users = s.layout().num_users();
  const double sigma = s.config().noise_power_dl;
  const int tau_d = s.config().data_length();

  std::vector<int> receivers(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) receivers[static_cast<std::size_t>(k)] = s.layout().user(0, k);

  // Per user: one Variant per emitted row.
  const bool want_h = spec.wants(kEstHardening);
  const bool want_ma = spec.wants(kEstModelAided);
  const bool want_or = spec.wants(kEstOracle);
  const bool want_nn = spec.wants(kEstNeural);
  enum Slot { kH, kLit, kBlind, kOr, kNn, kSlots };
  std::vector<std::vector<Variant>> acc(static_cast<std::size_t>(k_users));
  std::vector<PerfectCsiAccumulator> perfect(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    const int u = receivers[static_cast<std::size_t>(k)];
    auto& v = acc[static_cast<std::size_t>(k)];
    v.resize(kSlots);
    for (auto& item : v) item.moments = SeMoments(n_users, u);
  }

  ChannelBlock block;
  const DownlinkOptions dl{.receivers = receivers};
  for (int b = 0; b < spec.n_blocks; ++b) {
    Rng rng = make_stream(spec.seed, idx, static_cast<std::uint64_t>(b) + 1, stream::kBlock);
    generate_block(s, stats, plan, rng, block);
    const BlockObservation obs = simulate_block(block.gains, s.eta(), sigma, tau_d, rng, dl);
    for (int k = 0; k < k_users; ++k) {
      const int u = receivers[static_cast<std::size_t>(k)];
      auto& v = acc[static_cast<std::size_t>(k)];
      const Complex truth = block.gains.alpha(u, u);
      const Eigen::RowVectorXcd row_vec = block.gains.alpha.row(u);
      const std::span<const Complex> row(row_vec.data(), static_cast<std::size_t>(n_users));
      const double eta = s.eta()[static_cast<std::size_t>(u)];
      const double mean = hardening_mean(s, plan, u);
      const double tu = t[u];
      const double theta = spec.theta_factor * tu;
      const double reject = kRejectScale * std::sqrt(s.downlink_power() * s.beta(0, k, 0));
      const double xi = obs.xi[static_cast<std::size_t>(u)];
      const double xi_loo = obs.xi_loo[static_cast<std::size_t>(u)];

      if (want_h) {
        v[kH].nmse.add(mean, truth);
        v[kH].moments.add(row, mean, reject);
      }
      if (want_ma) {
        const GainEstimate est = model_aided_estimate(xi, tu, eta, theta, mean);
        const GainEstimate bar = model_aided_estimate(xi_loo, tu, eta, theta, mean);
        v[kLit].nmse.add(est.value, truth);
        v[kLit].moments.add(row, bar.value, reject);
        v[kLit].blind += est.branch == Branch::kBlind;
        ++v[kLit].total;

        const double blind_est = std::sqrt(std::max(0.0, xi - tu) / eta);
        const double blind_bar = std::sqrt(std::max(0.0, xi_loo - tu) / eta);
        v[kBlind].nmse.add(blind_est, truth);
        v[kBlind].moments.add(row, blind_bar, reject);
        v[kBlind].blind += xi > tu;
        ++v[kBlind].total;
        if (!want_h) v[kH].moments.add(row, mean, reject);
      }
      if (want_or) {
        const GainEstimate est = oracle_estimate(block.gains, s.eta(), sigma, tu, u, theta, mean);
        v[kOr].nmse.add(est.value, truth);
        v[kOr].moments.add(row, est.value, reject);
        v[kOr].blind += est.branch == Branch::kOracle;
        ++v[kOr].total;
      }
      if (want_nn) {
        const double erb = eta * s.downlink_power() * s.beta(0, k, 0);
        const GainEstimate est = neural_estimate(*model, xi, tu, erb);
        const GainEstimate bar = neural_estimate(*model, xi_loo, tu, erb);
        v[kNn].nmse.add(est.value, truth);
        v[kNn].moments.add(row, bar.value, reject);
      }
      if (spec.perfect_csi) perfect[static_cast<std::size_t>(k)].add(perfect_csi_sinr(row, s.eta(), sigma, u));
    }
  }

  std::vector<UserRecord> out;
  for (int k = 0; k < k_users; ++k) {
    auto& v = acc[static_cast<std::size_t>(k)];
    auto push = [&](std::string_view name, double nmse_value, double se, double fraction) {
      out.push_back({index, 0, k, std::string(name), nmse_value, se, fraction});
    };
    auto fraction = [](const Variant& x) {
      return x.total == 0 ? kNan : static_cast<double>(x.blind) / static_cast<double>(x.total);
    };
    const double se_h = se_or_nan(v[kH].moments, s);
    if (want_h) push(kEstHardening, v[kH].nmse.value(), se_h, 0.0);
    if (want_ma) {
      const double se_lit = se_or_nan(v[kLit].moments, s);
      const double se_blind = se_or_nan(v[kBlind].moments, s);
      // SE-maximizing choice among the switching, always-blind and
      // always-fallback variants; invalid variants drop out.
      double se_sel = se_h;
      for (double x : {se_lit, se_blind}) {
        if (!std::isnan(x)) se_sel = std::isnan(se_sel) ? x : std::max(se_sel, x);
      }
      push(kEstModelAided, v[kLit].nmse.value(), se_sel, fraction(v[kLit]));
      push(kEstModelAidedLiteral, v[kLit].nmse.value(), se_lit, fraction(v[kLit]));
      push(kEstModelAidedBlind, v[kBlind].nmse.value(), se_blind, fraction(v[kBlind]));
    }
    if (want_or) push(kEstOracle, v[kOr].nmse.value(), se_or_nan(v[kOr].moments, s), fraction(v[kOr]));
    if (want_nn) push(kEstNeural, v[kNn].nmse.value(), se_or_nan(v[kNn].moments, s), kNan);
    if (spec.perfect_csi) {
      push(kEstPerfectCsi, 0.0,
           se_perfect_csi(perfect[static_cast<std::size_t>(k)], s.config().pilot_length(),
                          s.config().coherence_length),
           kNan);
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const MlpModel* model) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<UserRecord>> slots(static_cast<std::size_t>(spec.n_scenarios));
  std::vector<std::string> errors(static_cast<std::size_t>(spec.n_scenarios));
  std::vector<char> ok(static_cast<std::size_t>(spec.n_scenarios), 0);
  parallel_for(spec.n_scenarios, spec.threads, [&](int i) {
    const auto si = static_cast<std::size_t>(i);
    try {
      slots[si] = evaluate_scenario(spec, model, i);
      ok[si] = 1;
    } catch (const std::exception& e) {
      errors[si] = e.what();
    }
  });

  ExperimentResult result;
  result.seed = spec.seed;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!ok[i]) {
      result.failed = true;
      result.failure = "scenario " + std::to_string(i) + ": " + errors[i];
      break;
    }
    result.records.insert(result.records.end(), slots[i].begin(), slots[i].end());
    ++result.scenarios_completed;
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<double> ExperimentResult::column(std::string_view estimator, bool se) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.estimator == estimator) out.push_back(se ? r.se_bits : r.nmse);
  }
  return out;
}

std::string results_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << kResultsSchema << '\n';
  os << "# seed=" << result.seed << '\n';
  os << kCsvHeader << '\n';
  char buf[128];
  for (const auto& r : result.records) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", r.nmse, r.se_bits,
                  r.branch_fraction_blind);
    os << r.scenario_id << ',' << r.cell << ',' << r.user << ',' << r.estimator << buf;
  }
  if (result.failed) os << "# FAILED after " << result.scenarios_completed << " scenarios: " << result.failure << '\n';
  return os.str();
}

void write_results_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  os << results_csv(result);
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

ExperimentResult read_results_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kResultsSchema) {
    throw Error(ErrorCode::kCorruptFile, "missing results schema line in " + path.string());
  }
  ExperimentResult result;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.starts_with("# seed=")) {
      result.seed = std::stoull(line.substr(7));
      continue;
    }
    if (line.starts_with("# FAILED")) {
      result.failed = true;
      result.failure = line.substr(2);
      continue;
    }
    if (line.starts_with("#")) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw Error(ErrorCode::kCorruptFile, "unexpected results header");
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string f[7];
    for (auto& field : f) {
      if (!std::getline(ss, field, ',')) throw Error(ErrorCode::kCorruptFile, "short results row");
    }
    try {
      result.records.push_back({std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2]), f[3],
                                std::strtod(f[4].c_str(), nullptr),
                                std::strtod(f[5].c_str(), nullptr),
                                std::strtod(f[6].c_str(), nullptr)});
    } catch (const std::exception&) {
      throw Error(ErrorCode::kCorruptFile, "bad results row: " + line);
    }
  }
  int max_id = -1;
  for (const auto& r : result.records) max_id = std::max(max_id, r.scenario_id);
  result.scenarios_completed = max_id + 1;
  return result;
}

std::string report_table(const ExperimentResult& result) {
  std::vector<std::string> order;
  for (const auto& r : result.records) {
    if (std::find(order.begin(), order.end(), r.estimator) == order.end()) order.push_back(r.estimator);
  }
  static constexpr double kPoints[] = {0.05, 0.25, 0.50, 0.75, 0.95};
  std::ostringstream os;
  char buf[256];
  for (const bool se : {false, true}) {
    os << (se ? "SE [bit/s/Hz]" : "NMSE") << '\n';
    std::snprintf(buf, sizeof buf, "%-20s %6s %12s %12s %12s %12s %12s\n", "estimator", "n", "p5",
                  "p25", "p50", "p75", "p95");
    os << buf;
    for (const auto& name : order) {
      std::vector<double> values;
      for (double x : result.column(name, se)) {
        if (!std::isnan(x)) values.push_back(x);
      }
      if (values.empty()) continue;
      const CdfSummary cdf = cdf_percentiles(values);
      std::snprintf(buf, sizeof buf, "%-20s %6zu", name.c_str(), cdf.size());
      os << buf;
      for (double p : kPoints) {
        std::snprintf(buf, sizeof buf, " %12.6g", cdf.percentile(p));
        os << buf;
      }
      os << '\n';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace dlgain
