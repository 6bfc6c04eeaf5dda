#include "dlgain/linalg.hpp"

#include <cmath>
#include <string>

#include "dlgain/error.hpp"

namespace dlgain {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kJitterScale = 1e-12;
constexpr double kMinRcond = 1e-14;

bool factor_ok(const Eigen::LLT<CMatrix>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const CMatrix l = llt.matrixL();
  return l.allFinite();
}

}  // namespace

HermitianPsd::HermitianPsd(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw Error(ErrorCode::kNotPsd, "matrix must be square and non-empty");
  }
  const double norm = matrix_.norm();
  const double asym = (matrix_ - matrix_.adjoint()).norm();
  if (asym > kHermitianTol * norm) {
    throw Error(ErrorCode::kNotPsd, "matrix is not Hermitian (relative asymmetry " +
                                        std::to_string(asym / norm) + ")");
  }
}

const CMatrix& HermitianPsd::cholesky() const {
  if (!cholesky_) throw Error(ErrorCode::kNotPsd, "Cholesky factor not computed");
  return *cholesky_;
}

void HermitianPsd::factorize() {
  if (!cholesky_) cholesky_ = cholesky_factor(*this);
}

CMatrix cholesky_factor(const HermitianPsd& a) {
  const auto m = a.size();
  const double tr = a.trace();
  if (tr == 0.0 && a.matrix().norm() == 0.0) return CMatrix::Zero(m, m);

  Eigen::LLT<CMatrix> llt(a.matrix());
  if (factor_ok(llt)) return llt.matrixL();

  CMatrix jittered = a.matrix();
  jittered.diagonal().array() += kJitterScale * tr / static_cast<double>(m);
  llt.compute(jittered);
  if (factor_ok(llt)) return llt.matrixL();
  throw Error(ErrorCode::kNotPsd, "Cholesky factorization failed after jitter");
}

CVector sample_cn(const CMatrix& lower, Rng& rng) {
  CVector v(lower.cols());
  fill_standard_cn(rng, {v.data(), static_cast<std::size_t>(v.size())});
  return lower.triangularView<Eigen::Lower>() * v;
}

CVector sample_cn(const HermitianPsd& r, Rng& rng) { return sample_cn(r.cholesky(), rng); }

CMatrix hermitian_solve(const HermitianPsd& a, const CMatrix& b) {
  if (b.rows() != a.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "right-hand side rows do not match");
  }
  Eigen::LLT<CMatrix> llt(a.matrix());
  if (!factor_ok(llt) || llt.rcond() < kMinRcond) {
    throw Error(ErrorCode::kSingular, "matrix is singular or too ill-conditioned");
  }
  return llt.solve(b);
}

CMatrix gram_pseudoinverse_columns(const CMatrix& g) {
  if (g.rows() < g.cols()) {
    throw Error(ErrorCode::kRankDeficient, "pseudo-inverse needs rows >= cols");
  }
  const CMatrix gram = g.adjoint() * g;
  Eigen::LLT<CMatrix> llt(gram);
  if (!factor_ok(llt) || llt.rcond() < kMinRcond) {
    throw Error(ErrorCode::kRankDeficient, "Gram matrix is singular");
  }
  // Z = G (G^H G)^{-1} = ((G^H G)^{-1} G^H)^H since the Gram matrix is Hermitian.
  return llt.solve(g.adjoint()).adjoint();
}

}  // namespace dlgain
