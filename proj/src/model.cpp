#include "flad/model.hpp"

#include <algorithm>
#include <cmath>

namespace flad {

namespace {

void require_finite(const Matrix& M, const char* name) {
  if (!M.allFinite()) {
    throw NonFiniteError(std::string(name) + " contains NaN or Inf");
  }
}

}  // namespace

Dataset Dataset::validate(Matrix Y, Matrix X, bool intercept_expected) {
  if (Y.rows() != X.rows()) {
    throw DimensionMismatch("Y has " + std::to_string(Y.rows()) +
                            " rows but X has " + std::to_string(X.rows()));
  }
  if (Y.rows() < 1 || Y.cols() < 1) {
    throw DimensionMismatch("Y must be at least 1x1");
  }
  if (X.cols() < 2) {
    throw DimensionMismatch("X must have an intercept column and p >= 1 covariates");
  }
  require_finite(Y, "Y");
  require_finite(X, "X");
  if (intercept_expected && (X.col(0).array() != 1.0).any()) {
    throw BadIntercept("column 0 of X must be identically 1");
  }
  return Dataset(std::move(Y), std::move(X));
}

Dataset Dataset::augmented(Matrix Y, Matrix X) {
  if (Y.rows() != X.rows()) {
    throw DimensionMismatch("Y has " + std::to_string(Y.rows()) +
                            " rows but X has " + std::to_string(X.rows()));
  }
  require_finite(Y, "Y");
  require_finite(X, "X");
  return Dataset(std::move(Y), std::move(X));
}

Dataset Dataset::rows(const std::vector<int>& idx) const {
  Matrix Ysub(static_cast<Index>(idx.size()), q());
  Matrix Xsub(static_cast<Index>(idx.size()), X_.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Ysub.row(static_cast<Index>(i)) = Y_.row(idx[i]);
    Xsub.row(static_cast<Index>(i)) = X_.row(idx[i]);
  }
  return Dataset(std::move(Ysub), std::move(Xsub));
}

CoefMatrix::CoefMatrix(Matrix b) : B(std::move(b)) {
  if (B.rows() < 1 || B.cols() < 1) {
    throw DimensionMismatch("coefficient matrix must be at least 1x1");
  }
  if (!B.allFinite()) {
    throw NonFiniteError("coefficient matrix contains NaN or Inf");
  }
}

PenaltySpec::PenaltySpec(std::vector<int> gamma_in, std::vector<int> delta_in,
                         double lambda1_in, double lambda2_in)
    : gamma(std::move(gamma_in)),
      delta(std::move(delta_in)),
      lambda1(lambda1_in),
      lambda2(lambda2_in) {
  if (lambda1 < 0.0 || lambda2 < 0.0) {
    throw BadSpec("tuning values must be nonnegative");
  }
  if (!gamma.empty() && delta.size() + 1 != gamma.size()) {
    throw BadSpec("delta must have length p-1");
  }
  auto check01 = [](const std::vector<int>& v, const char* name) {
    if (std::any_of(v.begin(), v.end(), [](int x) { return x != 0 && x != 1; })) {
      throw BadSpec(std::string(name) + " entries must be 0 or 1");
    }
  };
  check01(gamma, "gamma");
  check01(delta, "delta");
  d1_ = static_cast<int>(std::count(gamma.begin(), gamma.end(), 1));
  d2_ = static_cast<int>(std::count(delta.begin(), delta.end(), 1));
}

PenaltySpec PenaltySpec::all(Index p, double lambda1, double lambda2) {
  return PenaltySpec(std::vector<int>(static_cast<std::size_t>(p), 1),
                     std::vector<int>(p > 1 ? static_cast<std::size_t>(p - 1) : 0, 1),
                     lambda1, lambda2);
}

double zero_threshold(const Matrix& B, double zero_tau) {
  return zero_tau * std::max(1.0, B.cwiseAbs().maxCoeff());
}

}  // namespace flad
