#pragma once

#include <span>
#include <vector>

#include "dlgain/random.hpp"

namespace dlgain {

// sum |estimate - truth|^2 / sum |truth|^2.
double nmse(std::span<const Complex> estimates, std::span<const Complex> truths);
double nmse(std::span<const double> estimates, std::span<const Complex> truths);

// Streaming sample moments of the equalized gains of one user: the ratio
// alpha_own / alpha_bar, the interference ratios alpha(u, u') / alpha_bar
// and 1 / |alpha_bar|^2. Partial accumulators merge in a fixed order.
class SeMoments {
 public:
  SeMoments() = default;
  SeMoments(int n_users, int user);

  int user() const { return user_; }
  long long samples() const { return n_; }
  long long rejected() const { return rejected_; }

  // `gains_row` holds alpha(user, u') for all u'. Samples with
  // |alpha_bar| < reject_below are counted as rejected.
  void add(std::span<const Complex> gains_row, double alpha_bar, double reject_below = 0.0);
  void merge(const SeMoments& other);

  Complex mean_ratio() const;
  double var_ratio() const;
  double cross_term(int other_user) const;
  double inv_sq() const;

  double mean_ratio_std_error() const;
  double cross_term_std_error(int other_user) const;
  double inv_sq_std_error() const;

 private:
  int user_ = 0;
  long long n_ = 0;
  long long rejected_ = 0;
  Complex sum_ratio_{0.0, 0.0};
  double sum_ratio_sq_ = 0.0;
  std::vector<double> sum_cross_;
  std::vector<double> sum_cross_sq_;
  double sum_inv_ = 0.0;
  double sum_inv_sq_ = 0.0;
};

// Fraction of rejected samples above which se_equalized fails.
inline constexpr double kMaxRejectedFraction = 1e-3;

// (1 - tau_p / tau_c) log2(1 + SINR) with
//   SINR = |E{r}|^2 / (var{r} + sum_{u' != u} eta_{u'}/eta_u E{|alpha(u,u')/alpha_bar|^2}
//                      + sigma_dl^2 / eta_u E{1/|alpha_bar|^2}),  r = alpha_own / alpha_bar.
// Throws kDegenerateMoments for non-finite moments, no samples, or too many
// rejected samples.
double se_equalized(const SeMoments& moments, const std::vector<double>& eta, double sigma_dl,
                    int tau_p, int tau_c);

// Instantaneous SINR with the receiver knowing every gain.
double perfect_csi_sinr(std::span<const Complex> gains_row, const std::vector<double>& eta,
                        double sigma_dl, int user);

// Averages log2(1 + SINR) over blocks.
class PerfectCsiAccumulator {
 public:
  void add(double sinr);
  void merge(const PerfectCsiAccumulator& other);
  long long samples() const { return n_; }
  double mean_log2() const;

 private:
  long long n_ = 0;
  double sum_ = 0.0;
};

double se_perfect_csi(const PerfectCsiAccumulator& acc, int tau_p, int tau_c);

class CdfSummary {
 public:
  explicit CdfSummary(std::vector<double> samples);

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }
  // p in [0, 1], linear interpolation between order statistics.
  double percentile(double p) const;
  double median() const { return percentile(0.5); }

 private:
  std::vector<double> sorted_;
};

// Throws kEmptySample for an empty input.
CdfSummary cdf_percentiles(std::vector<double> samples);

}  // namespace dlgain
