// Acceptance suite: one PASS/FAIL line per criterion, details underneath.
// Seeds and tolerances are fixed here and never tuned after a run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "dlgain/block.hpp"
#include "dlgain/dataset.hpp"
#include "dlgain/downlink.hpp"
#include "dlgain/estimators.hpp"
#include "dlgain/experiment.hpp"
#include "dlgain/metrics.hpp"
#include "dlgain/mlp.hpp"
#include "dlgain/uplink.hpp"

using namespace dlgain;

namespace {

constexpr std::uint64_t kSeed = 20240611;

// Criterion 1
constexpr int kOracleScenarios = 20;
constexpr int kOracleBlocks = 100000;
constexpr double kOracleSigmas = 3.0;
// Criterion 2
constexpr double kPowerRelTol = 0.05;
constexpr double kSlopeLo = -0.65;
constexpr double kSlopeHi = -0.35;
constexpr int kPowerReps = 50;
// Criterion 3
constexpr int kLlnDrops = 100;
// Criteria 4-6
constexpr int kFigScenarios = 200;
constexpr int kFigBlocks = 500;
constexpr double kGapSigmas = 3.0;
constexpr int kBootstrap = 2000;
constexpr double kHardeningRelTol = 0.05;
// Criterion 7
constexpr double kSingleCellSlopeMax = -0.3;
constexpr double kContaminatedSlopeMin = -0.1;
constexpr int kContamDrops = 20;
constexpr int kContamBlocks = 200;
// Criteria 8-9
constexpr int kNnLarge = 200;
constexpr int kNnSmall = 200;
constexpr double kNeuralNmseSlack = 1.1;
constexpr int kK10Large = 100;
constexpr int kK10Small = 100;

int failures = 0;

void verdict(int id, bool pass, const std::string& what, double seconds) {
  std::printf("[%s] criterion %2d: %s (%.0f s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
void detail(const char* fmt, Args... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double median(std::vector<double> v) { return cdf_percentiles(std::move(v)).median(); }

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Paired bootstrap of median(a) - median(b) over aligned user records.
struct Gap {
  double value = 0.0;
  double std_error = 0.0;
};

Gap median_gap(const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed) {
  Gap g;
  g.value = median(a) - median(b);
  Rng rng = make_stream(seed, 0xb007);
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  std::vector<double> ra(a.size()), rb(b.size()), diffs(kBootstrap);
  for (int r = 0; r < kBootstrap; ++r) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t j = pick(rng);
      ra[i] = a[j];
      rb[i] = b[j];
    }
    diffs[static_cast<std::size_t>(r)] = median(ra) - median(rb);
  }
  const double m = std::accumulate(diffs.begin(), diffs.end(), 0.0) / kBootstrap;
  double ss = 0.0;
  for (double d : diffs) ss += (d - m) * (d - m);
  g.std_error = std::sqrt(ss / (kBootstrap - 1));
  return g;
}

NetworkConfig fig_network(FadingMode mode, double snr_db) {
  NetworkConfig cfg;
  cfg.num_antennas = 64;
  cfg.users_per_cell = 3;
  cfg.fading_mode = mode;
  cfg.snr_edge_db = snr_db;
  return cfg;
}

PrecodingPlan make_plan(const Scenario& s, const UplinkStatistics& st, Scheme scheme, Rng& rng) {
  PrecoderOptions opt;
  opt.scheme = scheme;
  opt.zf_norm = s.iid() ? ZfNormMode::kAnalyticIid : ZfNormMode::kMonteCarlo;
  return make_precoding_plan(s, st, opt, rng);
}

// ---------------------------------------------------------------------------

struct OracleTally {
  int users = 0;
  int within = 0;
  double max_z = 0.0;
  double sum_z2 = 0.0;
};

void tally(OracleTally& t, const InterferenceConstant& closed, const InterferenceConstant& mc) {
  for (std::size_t u = 0; u < closed.t.size(); ++u) {
    const double z = std::abs(closed.t[u] - mc.t[u]) / mc.std_error[u];
    ++t.users;
    t.within += z <= kOracleSigmas;
    t.max_z = std::max(t.max_z, z);
    t.sum_z2 += z * z;
  }
}

void criterion1() {
  Stopwatch sw;
  NetworkConfig cfg;
  cfg.num_antennas = 32;
  cfg.users_per_cell = 3;
  OracleTally mr_corr, printed, mr_iid, zf_iid;
  for (int i = 0; i < kOracleScenarios; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    for (FadingMode mode : {FadingMode::kCorrelated, FadingMode::kUncorrelated}) {
      cfg.fading_mode = mode;
      const std::uint64_t tag = mode == FadingMode::kCorrelated ? 1 : 2;
      Rng setup = make_stream(kSeed + 1, idx, tag, stream::kSetup);
      const Scenario s = build_scenario(cfg, setup);
      const UplinkStatistics st = precompute_statistics(s);
      for (Scheme scheme : {Scheme::kMr, Scheme::kZf}) {
        if (mode == FadingMode::kCorrelated && scheme == Scheme::kZf) continue;
        Rng norm = make_stream(kSeed + 1, idx, tag, stream::kNormConstants);
        const PrecodingPlan plan = make_plan(s, st, scheme, norm);
        Rng mc_rng = make_stream(kSeed + 1, idx, tag * 10 + static_cast<std::uint64_t>(scheme),
                                 stream::kInterference);
        const InterferenceConstant mc = t_monte_carlo(s, st, plan, kOracleBlocks, mc_rng);
        if (mode == FadingMode::kCorrelated) {
          tally(mr_corr, t_mr_correlated(s, st, plan), mc);
          tally(printed, t_mr_correlated_as_printed(s, st, plan), mc);
        } else if (scheme == Scheme::kMr) {
          tally(mr_iid, t_mr_iid(s, st, plan), mc);
        } else {
          tally(zf_iid, t_zf_iid(s, st, plan), mc);
        }
      }
    }
  }
  auto line = [](const char* name, const OracleTally& t) {
    detail("%-22s %3d/%3d users within %.0f SE, max |z| = %.2f, mean z^2 = %.2f", name, t.within,
           t.users, kOracleSigmas, t.max_z, t.sum_z2 / t.users);
  };
  line("t_mr_correlated", mr_corr);
  line("t_mr_iid", mr_iid);
  line("t_zf_iid", zf_iid);
  line("as-printed (diag.)", printed);
  const bool pass = mr_corr.within == mr_corr.users && mr_iid.within == mr_iid.users &&
                    zf_iid.within == zf_iid.users;
  verdict(1, pass, "closed-form T matches Monte Carlo T (10^5 blocks, 3 SE, every user)", sw.seconds());
}

void criterion2() {
  Stopwatch sw;
  Rng setup = make_stream(kSeed + 2, 0, 0, stream::kSetup);
  const Scenario s = build_scenario(fig_network(FadingMode::kCorrelated, 10.0), setup);
  const UplinkStatistics st = precompute_statistics(s);
  Rng rng = make_stream(kSeed + 2, 0, 0, stream::kBlock);
  const PrecodingPlan plan = make_plan(s, st, Scheme::kMr, rng);
  const ChannelBlock block = generate_block(s, st, plan, rng);
  const int user = 0;
  const double sigma = s.config().noise_power_dl;
  const double limit = asymptotic_xi(block.gains, s.eta(), sigma, user);
  std::vector<double> lx, ly;
  double rel_at_max = 0.0;
  for (int tau : {100, 1000, 10000, 100000}) {
    double sq = 0.0;
    for (int r = 0; r < kPowerReps; ++r) {
      Rng sym = make_stream(kSeed + 2, static_cast<std::uint64_t>(tau), static_cast<std::uint64_t>(r) + 1);
      const double xi =
          simulate_block(block.gains, s.eta(), sigma, tau, sym, {.receivers = {user}}).xi[user];
      sq += (xi - limit) * (xi - limit);
      if (tau == 100000 && r == 0) rel_at_max = std::abs(xi - limit) / limit;
    }
    const double rms = std::sqrt(sq / kPowerReps);
    detail("tau_d = %6d: RMS |xi - limit| / limit = %.4g", tau, rms / limit);
    lx.push_back(std::log(tau));
    ly.push_back(std::log(rms));
  }
  const double slope = ls_slope(lx, ly);
  detail("relative error at tau_d = 10^5: %.4g (limit %.2g); log-log slope %.3f", rel_at_max,
         kPowerRelTol, slope);
  verdict(2, rel_at_max < kPowerRelTol && slope >= kSlopeLo && slope <= kSlopeHi,
          "sample power converges to its limit at rate tau_d^-1/2", sw.seconds());
}

void criterion3() {
  Stopwatch sw;
  NetworkConfig base;
  base.num_antennas = 128;
  base.fading_mode = FadingMode::kUncorrelated;
  const std::vector<LlnPoint> pts = check_lln_over_users(base, {5, 20, 80}, kLlnDrops, kSeed + 3);
  bool decreasing = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    detail("K = %2d: RMS gap %.4g (%d drops)", pts[i].users_per_cell, pts[i].rms_gap, pts[i].drops);
    if (i > 0 && !(pts[i].rms_gap < pts[i - 1].rms_gap)) decreasing = false;
  }
  verdict(3, decreasing, "LLN gap strictly decreases over K = 5, 20, 80 (M = 128)", sw.seconds());
}

// ---------------------------------------------------------------------------

struct FigRun {
  ExperimentResult result;
  double seconds = 0.0;
};

FigRun run_fig(FadingMode mode, Scheme scheme, double snr_db, std::uint64_t seed,
               const MlpModel* model) {
  Stopwatch sw;
  ExperimentSpec spec;
  spec.network = fig_network(mode, snr_db);
  spec.scheme = scheme;
  spec.n_scenarios = kFigScenarios;
  spec.n_blocks = kFigBlocks;
  spec.seed = seed;
  spec.estimators = {"hardening", "model_aided", "oracle"};
  if (model != nullptr) {
    spec.estimators.push_back("neural");
    spec.model_path = "in-memory";
  }
  FigRun run{run_experiment(spec, model), 0.0};
  run.seconds = sw.seconds();
  if (run.result.failed) detail("run failed: %s", run.result.failure.c_str());
  return run;
}

void print_medians(const ExperimentResult& r) {
  for (const char* name : {"hardening", "model_aided", "model_aided_literal", "model_aided_blind",
                           "oracle", "neural", "perfect_csi"}) {
    const std::vector<double> nm = r.column(name, false);
    if (nm.empty()) continue;
    std::vector<double> se;
    for (double x : r.column(name, true)) {
      if (!std::isnan(x)) se.push_back(x);
    }
    detail("%-20s median NMSE %-10.4g median SE %-8.4g (%zu of %zu SE values valid)", name,
           median(nm), se.empty() ? std::nan("") : median(se), se.size(), nm.size());
  }
}

double criterion4(const FigRun& run) {
  const ExperimentResult& r = run.result;
  print_medians(r);
  const double nm_h = median(r.column("hardening", false));
  const double nm_m = median(r.column("model_aided", false));
  const Gap upper = median_gap(r.column("perfect_csi", true), r.column("model_aided", true), kSeed + 40);
  const Gap lower = median_gap(r.column("model_aided", true), r.column("hardening", true), kSeed + 41);
  detail("SE gap perfect_csi - model_aided = %.4g (bootstrap SE %.3g)", upper.value, upper.std_error);
  detail("SE gap model_aided - hardening   = %.4g (bootstrap SE %.3g)", lower.value, lower.std_error);
  const bool pass = !r.failed && nm_m < nm_h && upper.value > kGapSigmas * upper.std_error &&
                    lower.value > kGapSigmas * lower.std_error;
  verdict(4, pass, "correlated MR: NMSE model_aided < hardening; SE perfect > model_aided > hardening",
          run.seconds);
  return lower.value;
}

void criterion5(double mr_gap) {
  const FigRun run = run_fig(FadingMode::kCorrelated, Scheme::kZf, 10.0, kSeed + 5, nullptr);
  print_medians(run.result);
  const double zf_gap =
      median(run.result.column("model_aided", true)) - median(run.result.column("hardening", true));
  detail("|ZF gap| = %.4g, MR gap = %.4g", std::abs(zf_gap), mr_gap);
  verdict(5, !run.result.failed && std::abs(zf_gap) < std::abs(mr_gap),
          "correlated ZF: model_aided vs hardening SE gap smaller than under MR", run.seconds);
}

void criterion6() {
  const FigRun run = run_fig(FadingMode::kUncorrelated, Scheme::kZf, 0.0, kSeed + 6, nullptr);
  print_medians(run.result);
  const double h = median(run.result.column("hardening", true));
  const double m = median(run.result.column("model_aided", true));
  detail("relative difference %.4g (tolerance %.2g)", std::abs(h - m) / m, kHardeningRelTol);
  verdict(6, !run.result.failed && std::abs(h - m) <= kHardeningRelTol * m,
          "uncorrelated ZF at 0 dB: hardening SE within 5% of model_aided", run.seconds);
}

// Pooled std of (alpha_hat / alpha - 1) under the oracle estimate.
double oracle_ratio_std(int cells, int antennas, std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.num_cells = cells;
  cfg.num_antennas = antennas;
  cfg.fading_mode = FadingMode::kUncorrelated;
  if (cells == 1) cfg.area_side = 250.0;
  double sum_sq = 0.0;
  Complex sum = 0.0;
  long long n = 0;
  for (int d = 0; d < kContamDrops; ++d) {
    const auto idx = static_cast<std::uint64_t>(d);
    Rng setup = make_stream(seed, idx, 0, stream::kSetup);
    const Scenario s = build_scenario(cfg, setup);
    const UplinkStatistics st = precompute_statistics(s);
    Rng norm = make_stream(seed, idx, 0, stream::kNormConstants);
    const PrecodingPlan plan = make_plan(s, st, Scheme::kMr, norm);
    const InterferenceConstant t = t_mr_iid(s, st, plan);
    ChannelBlock block;
    for (int b = 0; b < kContamBlocks; ++b) {
      Rng rng = make_stream(seed, idx, static_cast<std::uint64_t>(b) + 1, stream::kBlock);
      generate_block(s, st, plan, rng, block);
      for (int k = 0; k < s.users(); ++k) {
        const int u = s.layout().user(0, k);
        const GainEstimate e = oracle_estimate(block.gains, s.eta(), s.config().noise_power_dl,
                                               t[u], u, t[u], hardening_mean(s, plan, u));
        const Complex x = e.value / block.gains.alpha(u, u) - 1.0;
        sum += x;
        sum_sq += std::norm(x);
        ++n;
      }
    }
  }
  const Complex mean = sum / static_cast<double>(n);
  return std::sqrt(std::max(0.0, sum_sq / n - std::norm(mean)));
}

void criterion7() {
  Stopwatch sw;
  std::vector<double> lm, single, contaminated;
  for (int m : {32, 64, 128, 256}) {
    const double a = oracle_ratio_std(1, m, kSeed + 70);
    const double b = oracle_ratio_std(4, m, kSeed + 71);
    detail("M = %3d: std single cell %.4g, std 4 cells (f = 1) %.4g", m, a, b);
    lm.push_back(std::log(m));
    single.push_back(std::log(a));
    contaminated.push_back(std::log(b));
  }
  const double s1 = ls_slope(lm, single);
  const double s4 = ls_slope(lm, contaminated);
  detail("log-log slope: single cell %.3f (need < %.2f), contaminated %.3f (need > %.2f)", s1,
         kSingleCellSlopeMax, s4, kContaminatedSlopeMin);
  verdict(7, s1 < kSingleCellSlopeMax && s4 > kContaminatedSlopeMin,
          "oracle error persists under pilot contamination, vanishes in a single cell", sw.seconds());
}

MlpModel criterion8_train(Dataset& data, double& seconds) {
  Stopwatch sw;
  DatasetOptions opt;
  data = generate_dataset(fig_network(FadingMode::kCorrelated, 10.0), kNnLarge, kNnSmall, opt, kSeed + 8);
  detail("dataset: %lld rows generated in %.0f s", static_cast<long long>(data.size()), sw.seconds());
  TrainOptions topt;
  MlpModel model = fit_default_model(data, topt, kSeed + 8);
  const auto counts = model.parameter_counts();
  detail("trained %d epochs, best epoch %d; parameters per layer %zu %zu %zu %zu", model.metadata.epochs,
         model.metadata.best_epoch, counts[0], counts[1], counts[2], counts[3]);
  seconds = sw.seconds();
  return model;
}

void criterion8(const Dataset& data, const MlpModel& model, const FigRun& run, double train_seconds) {
  const ModelEvaluation ev = evaluate_model(model, data);
  detail("test MAE: model %.4g, hardening mean %.4g (%lld rows)", ev.model_mae, ev.hardening_mae,
         static_cast<long long>(ev.samples));
  const double nn = median(run.result.column("neural", false));
  const double ma = median(run.result.column("model_aided", false));
  detail("fresh run median NMSE: neural %.4g, model_aided %.4g (ratio %.3f, limit %.2f)", nn, ma,
         nn / ma, kNeuralNmseSlack);
  verdict(8, ev.model_mae < ev.hardening_mae && nn <= kNeuralNmseSlack * ma,
          "MLP beats the hardening predictor and tracks model_aided NMSE", train_seconds + run.seconds);
}

void criterion9(const MlpModel& model) {
  Stopwatch sw;
  NetworkConfig cfg = fig_network(FadingMode::kCorrelated, 10.0);
  cfg.users_per_cell = 10;
  DatasetOptions opt;
  const Dataset data = generate_dataset(cfg, kK10Large, kK10Small, opt, kSeed + 9);
  const ModelEvaluation ev = evaluate_model(model, data);
  detail("K = 10 test MAE: model %.4g, hardening mean %.4g (%lld rows)", ev.model_mae,
         ev.hardening_mae, static_cast<long long>(ev.samples));
  const Eigen::VectorXd pred = forward(model, data.features);
  detail("mean prediction / label %.3f; sqrt(3/10) = %.3f", (pred.array() / data.labels.array()).mean(),
         std::sqrt(0.3));
  verdict(9, ev.model_mae < ev.hardening_mae, "K = 3 model still beats the hardening predictor at K = 10",
          sw.seconds());
}

// ---------------------------------------------------------------------------

bool check(const char* name, bool ok) {
  detail("%-36s %s", name, ok ? "ok" : "FAILED");
  return ok;
}

bool scaling_identity() {
  NetworkConfig cfg;
  cfg.num_antennas = 32;
  cfg.fading_mode = FadingMode::kUncorrelated;
  Rng rng = make_stream(kSeed + 10, 1);
  const Scenario s = build_scenario(cfg, rng);
  const UplinkStatistics st = precompute_statistics(s);
  const ChannelEstimates est = run_uplink_training(s, st, rng);
  double worst = 0.0;
  for (int l = 0; l < s.cells(); ++l) {
    for (int k = 0; k < s.users(); ++k) {
      for (int l2 = 0; l2 < s.cells(); ++l2) {
        if (l2 == l) continue;
        const CVector other = cross_cell_estimate(s, st, est, l2, k, l);
        const CVector want = s.beta(l2, k, l) / s.beta(l, k, l) * est.g_hat.col(s.layout().user(l, k));
        worst = std::max(worst, (other - want).norm() / other.norm());
      }
    }
  }
  return worst < 1e-12;
}

bool zf_gramian() {
  NetworkConfig cfg;
  cfg.num_antennas = 32;
  Rng rng = make_stream(kSeed + 10, 2);
  const Scenario s = build_scenario(cfg, rng);
  const UplinkStatistics st = precompute_statistics(s);
  const PrecodingPlan plan = make_plan(s, st, Scheme::kZf, rng);
  double worst = 0.0;
  for (int b = 0; b < 20; ++b) {
    const ChannelBlock block = generate_block(s, st, plan, rng);
    for (int l = 0; l < s.cells(); ++l) {
      const CMatrix g = block.estimates.g_hat.middleCols(l * s.users(), s.users());
      const CMatrix z = gram_pseudoinverse_columns(g);
      worst = std::max(worst, (g.adjoint() * z - CMatrix::Identity(s.users(), s.users())).cwiseAbs().maxCoeff());
    }
  }
  return worst < 1e-8;
}

bool mmse_decomposition() {
  NetworkConfig cfg;
  cfg.num_antennas = 64;
  Rng rng = make_stream(kSeed + 10, 3);
  const Scenario s = build_scenario(cfg, rng);
  const UplinkStatistics st = precompute_statistics(s);
  double worst = 0.0;
  for (int l = 0; l < s.cells(); ++l) {
    for (int k = 0; k < s.users(); ++k) {
      const auto& u = st.user(l, k);
      const CMatrix& r = s.correlation(l, k, l).matrix();
      worst = std::max(worst, (u.est_cov.matrix() + u.err_cov.matrix() - r).norm() / r.norm());
    }
  }
  return worst < 1e-8;
}

bool gradient_check() {
  Rng rng = make_stream(kSeed + 10, 4);
  MlpModel m = make_mlp({3, 4, 1}, rng);
  for (auto& l : m.layers) {
    for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases(i) = 0.3 * standard_normal(rng);
  }
  RowMatrix x(16, 3);
  Eigen::VectorXd y(16);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = standard_normal(rng);
    y(i) = 3.0 * standard_normal(rng);
  }
  Gradients g, scratch;
  loss_and_gradient(m, x, y, g);
  const double h = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& p, double analytic) {
    const double keep = p;
    p = keep + h;
    const double up = loss_and_gradient(m, x, y, scratch);
    p = keep - h;
    const double down = loss_and_gradient(m, x, y, scratch);
    p = keep;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(numeric - analytic) /
                                std::max({std::abs(numeric), std::abs(analytic), 1e-8}));
  };
  for (std::size_t li = 0; li < m.layers.size(); ++li) {
    for (Eigen::Index r = 0; r < m.layers[li].weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.layers[li].weights.cols(); ++c) probe(m.layers[li].weights(r, c), g.weights[li](r, c));
      probe(m.layers[li].biases(r), g.biases[li](r));
    }
  }
  return worst < 1e-4;
}

bool adam_step() {
  Rng rng(1);
  MlpModel m = make_mlp({1, 1}, rng);
  m.layers[0].weights(0, 0) = 0.5;
  Gradients g;
  g.weights = {Eigen::MatrixXd::Ones(1, 1)};
  g.biases = {Eigen::VectorXd::Zero(1)};
  AdamOptions opt;
  Adam adam(m, opt);
  adam.step(m, g);
  return std::abs(m.layers[0].weights(0, 0) - (0.5 - opt.learning_rate / (1.0 + opt.epsilon))) < 1e-15;
}

bool thread_determinism() {
  ExperimentSpec spec;
  spec.network.num_antennas = 16;
  spec.network.users_per_cell = 2;
  spec.n_scenarios = 8;
  spec.n_blocks = 200;
  spec.seed = kSeed + 10;
  spec.threads = 1;
  const std::string a = results_csv(run_experiment(spec));
  spec.threads = 8;
  const std::string b = results_csv(run_experiment(spec));
  return a == b;
}

void criterion10() {
  Stopwatch sw;
  bool ok = true;
  ok &= check("estimate scaling between cells", scaling_identity());
  ok &= check("ZF Gramian identity", zf_gramian());
  ok &= check("MMSE covariance decomposition", mmse_decomposition());
  ok &= check("gradient finite-difference check", gradient_check());
  ok &= check("Adam single step", adam_step());
  ok &= check("thread-count determinism", thread_determinism());
  verdict(10, ok && sw.seconds() <= 120.0, "property checks pass within 2 minutes", sw.seconds());
}

}  // namespace

int main() {
  Stopwatch total;
  std::printf("acceptance suite, master seed %llu\n", static_cast<unsigned long long>(kSeed));
  try {
    criterion10();
    criterion2();
    criterion3();
    criterion7();
    Dataset data;
    double train_seconds = 0.0;
    const MlpModel model = criterion8_train(data, train_seconds);
    const FigRun mr = run_fig(FadingMode::kCorrelated, Scheme::kMr, 10.0, kSeed + 4, &model);
    const double mr_gap = criterion4(mr);
    criterion5(mr_gap);
    criterion6();
    criterion8(data, model, mr, train_seconds);
    criterion9(model);
    criterion1();
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed; total %.0f s\n", failures, total.seconds());
  return failures == 0 ? 0 : 1;
}
