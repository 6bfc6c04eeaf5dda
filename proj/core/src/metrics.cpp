#include "dlgain/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dlgain/error.hpp"

namespace dlgain {
namespace {

double mean_std_error(double sum, double sum_sq, long long n) {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  return std::sqrt(std::max(0.0, sum_sq / nn - mean * mean) / (nn - 1.0));
}

template <typename Estimate>
double nmse_impl(std::span<const Estimate> estimates, std::span<const Complex> truths) {
  if (estimates.empty()) throw Error(ErrorCode::kEmptySample, "NMSE of an empty sample");
  if (estimates.size() != truths.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "estimate and truth lengths differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    num += std::norm(Complex(estimates[i]) - truths[i]);
    den += std::norm(truths[i]);
  }
  return num / den;
}

}  // namespace

double nmse(std::span<const Complex> estimates, std::span<const Complex> truths) {
  return nmse_impl(estimates, truths);
}

double nmse(std::span<const double> estimates, std::span<const Complex> truths) {
  return nmse_impl(estimates, truths);
}

SeMoments::SeMoments(int n_users, int user)
    : user_(user), sum_cross_(static_cast<std::size_t>(n_users), 0.0),
      sum_cross_sq_(static_cast<std::size_t>(n_users), 0.0) {}

void SeMoments::add(std::span<const Complex> gains_row, double alpha_bar, double reject_below) {
  if (gains_row.size() != sum_cross_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "gain row has the wrong length");
  }
  if (!(std::abs(alpha_bar) >= reject_below) || alpha_bar == 0.0 || !std::isfinite(alpha_bar)) {
    ++rejected_;
    return;
  }
  ++n_;
  const double inv = 1.0 / (alpha_bar * alpha_bar);
  const Complex r = gains_row[static_cast<std::size_t>(user_)] / alpha_bar;
  const double r2 = std::norm(r);
  sum_ratio_ += r;
  sum_ratio_sq_ += r2;
  for (std::size_t j = 0; j < gains_row.size(); ++j) {
    const double c = std::norm(gains_row[j]) * inv;
    sum_cross_[j] += c;
    sum_cross_sq_[j] += c * c;
  }
  sum_inv_ += inv;
  sum_inv_sq_ += inv * inv;
}

void SeMoments::merge(const SeMoments& other) {
  if (other.sum_cross_.size() != sum_cross_.size() || other.user_ != user_) {
    throw Error(ErrorCode::kDimensionMismatch, "merging moments of different users");
  }
  n_ += other.n_;
  rejected_ += other.rejected_;
  sum_ratio_ += other.sum_ratio_;
  sum_ratio_sq_ += other.sum_ratio_sq_;
  for (std::size_t j = 0; j < sum_cross_.size(); ++j) {
    sum_cross_[j] += other.sum_cross_[j];
    sum_cross_sq_[j] += other.sum_cross_sq_[j];
  }
  sum_inv_ += other.sum_inv_;
  sum_inv_sq_ += other.sum_inv_sq_;
}

Complex SeMoments::mean_ratio() const { return sum_ratio_ / static_cast<double>(n_); }

double SeMoments::var_ratio() const {
  return std::max(0.0, sum_ratio_sq_ / static_cast<double>(n_) - std::norm(mean_ratio()));
}

double SeMoments::cross_term(int other_user) const {
  return sum_cross_[static_cast<std::size_t>(other_user)] / static_cast<double>(n_);
}

double SeMoments::inv_sq() const { return sum_inv_ / static_cast<double>(n_); }

double SeMoments::mean_ratio_std_error() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(var_ratio() / static_cast<double>(n_ - 1));
}

double SeMoments::cross_term_std_error(int other_user) const {
  const auto j = static_cast<std::size_t>(other_user);
  return mean_std_error(sum_cross_[j], sum_cross_sq_[j], n_);
}

double SeMoments::inv_sq_std_error() const { return mean_std_error(sum_inv_, sum_inv_sq_, n_); }

double se_equalized(const SeMoments& m, const std::vector<double>& eta, double sigma_dl,
                    int tau_p, int tau_c) {
  const long long total = m.samples() + m.rejected();
  if (m.samples() == 0) throw Error(ErrorCode::kDegenerateMoments, "no accepted samples");
  if (static_cast<double>(m.rejected()) > kMaxRejectedFraction * static_cast<double>(total)) {
    throw Error(ErrorCode::kDegenerateMoments,
                std::to_string(m.rejected()) + " of " + std::to_string(total) +
                    " samples had a vanishing gain estimate");
  }
  const int u = m.user();
  const double eta_u = eta[static_cast<std::size_t>(u)];
  double denom = m.var_ratio() + sigma_dl / eta_u * m.inv_sq();
  for (std::size_t j = 0; j < eta.size(); ++j) {
    if (static_cast<int>(j) != u) denom += eta[j] / eta_u * m.cross_term(static_cast<int>(j));
  }
  const double num = std::norm(m.mean_ratio());
  if (!std::isfinite(num) || !std::isfinite(denom) || !(denom > 0.0)) {
    throw Error(ErrorCode::kDegenerateMoments, "non-finite SINR moments");
  }
  const double prelog = 1.0 - static_cast<double>(tau_p) / tau_c;
  return prelog * std::log2(1.0 + num / denom);
}

double perfect_csi_sinr(std::span<const Complex> gains_row, const std::vector<double>& eta,
                        double sigma_dl, int user) {
  double interference = sigma_dl;
  for (std::size_t j = 0; j < gains_row.size(); ++j) {
    if (static_cast<int>(j) != user) interference += eta[j] * std::norm(gains_row[j]);
  }
  const auto u = static_cast<std::size_t>(user);
  return eta[u] * std::norm(gains_row[u]) / interference;
}

void PerfectCsiAccumulator::add(double sinr) {
  ++n_;
  sum_ += std::log2(1.0 + sinr);
}

void PerfectCsiAccumulator::merge(const PerfectCsiAccumulator& other) {
  n_ += other.n_;
  sum_ += other.sum_;
}

double PerfectCsiAccumulator::mean_log2() const {
  if (n_ == 0) throw Error(ErrorCode::kEmptySample, "no perfect-CSI samples");
  return sum_ / static_cast<double>(n_);
}

double se_perfect_csi(const PerfectCsiAccumulator& acc, int tau_p, int tau_c) {
  return (1.0 - static_cast<double>(tau_p) / tau_c) * acc.mean_log2();
}

CdfSummary::CdfSummary(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw Error(ErrorCode::kEmptySample, "CDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double CdfSummary::percentile(double p) const {
  p = std::clamp(p, 0.0, 1.0);
  const double pos = p * static_cast<double>(sorted_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_[lo] + frac * (sorted_[hi] - sorted_[lo]);
}

CdfSummary cdf_percentiles(std::vector<double> samples) { return CdfSummary(std::move(samples)); }

}  // namespace dlgain
