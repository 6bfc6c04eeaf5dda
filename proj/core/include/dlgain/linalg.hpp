#pragma once

#include <Eigen/Dense>
#include <optional>

#include "dlgain/random.hpp"

namespace dlgain {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Square Hermitian positive semi-definite matrix with an optional cached
// Cholesky factor. The factor is computed by factorize() during setup and is
// read-only afterwards, so shared instances are safe across threads.
class HermitianPsd {
 public:
  HermitianPsd() = default;

  // Throws kNotPsd if the matrix is not square or not Hermitian within
  // 1e-12 relative Frobenius tolerance.
  explicit HermitianPsd(CMatrix matrix);

  const CMatrix& matrix() const { return matrix_; }
  Eigen::Index size() const { return matrix_.rows(); }
  double trace() const { return matrix_.trace().real(); }

  bool has_cholesky() const { return cholesky_.has_value(); }
  const CMatrix& cholesky() const;
  void factorize();

 private:
  CMatrix matrix_;
  std::optional<CMatrix> cholesky_;
};

// Lower-triangular L with L L^H = a. A single retry with a diagonal jitter of
// 1e-12 * tr(a) / M is attempted for numerically semi-definite inputs.
CMatrix cholesky_factor(const HermitianPsd& a);

// L v with v ~ CN(0, I). The HermitianPsd overload requires factorize().
CVector sample_cn(const CMatrix& lower, Rng& rng);
CVector sample_cn(const HermitianPsd& r, Rng& rng);

// Solves a x = b. Throws kSingular when the reciprocal condition estimate is
// below 1e-14 or the factorization fails.
CMatrix hermitian_solve(const HermitianPsd& a, const CMatrix& b);

// Z = G (G^H G)^{-1} for an M x K matrix with M >= K. Throws kRankDeficient.
CMatrix gram_pseudoinverse_columns(const CMatrix& g);

}  // namespace dlgain
