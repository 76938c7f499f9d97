#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "flad/errors.hpp"

namespace flad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Paired response/design matrices. Y is n x q, X is n x (p+1) with the
/// intercept column of ones at position 0. For augmented problems the
/// intercept-column check is relaxed (pseudo-rows carry zeros there).
class Dataset {
 public:
  /// Validating constructor for raw data. Throws DimensionMismatch,
  /// NonFiniteError or BadIntercept.
  static Dataset validate(Matrix Y, Matrix X, bool intercept_expected = true);

  /// Constructor for augmented problems: column 0 may contain zeros in
  /// pseudo-rows; finiteness and row agreement are still enforced.
  static Dataset augmented(Matrix Y, Matrix X);

  const Matrix& Y() const { return Y_; }
  const Matrix& X() const { return X_; }

  Index n() const { return Y_.rows(); }
  Index p() const { return X_.cols() - 1; }
  Index q() const { return Y_.cols(); }

  /// Dataset restricted to a subset of observation rows (CV folds).
  Dataset rows(const std::vector<int>& idx) const;

 private:
  Dataset(Matrix Y, Matrix X) : Y_(std::move(Y)), X_(std::move(X)) {}

  Matrix Y_;
  Matrix X_;
};

/// Coefficient matrix B, (p+1) x q. Row 0 is the intercept vector; row j
/// (1 <= j <= p) is the coefficient vector of covariate j across outcomes.
struct CoefMatrix {
  Matrix B;

  CoefMatrix() = default;
  explicit CoefMatrix(Matrix b);

  Index p() const { return B.rows() - 1; }
  Index q() const { return B.cols(); }

  bool compatible_with(const Dataset& data) const {
    return B.rows() == data.p() + 1 && B.cols() == data.q();
  }
};

/// Penalty indicators and tuning values. gamma[j-1] says whether covariate j
/// is penalized; delta[k-1] whether the difference beta_{k+1} - beta_k is.
struct PenaltySpec {
  std::vector<int> gamma;  // length p, entries in {0,1}
  std::vector<int> delta;  // length p-1, entries in {0,1}
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  PenaltySpec() = default;
  PenaltySpec(std::vector<int> gamma_in, std::vector<int> delta_in,
              double lambda1_in, double lambda2_in);

  /// Penalize every covariate and every adjacent difference.
  static PenaltySpec all(Index p, double lambda1, double lambda2);

  int d1() const { return d1_; }
  int d2() const { return d2_; }

 private:
  int d1_ = 0;
  int d2_ = 0;
};

/// Contiguous covariate interval [first, last], 1-based inclusive.
struct FusedGroup {
  int first = 0;
  int last = 0;

  friend bool operator==(const FusedGroup&, const FusedGroup&) = default;
};

/// Output of a fit: estimate, penalized objective value (original
/// normalization), iteration trace and post-processed structure.
struct FitResult {
  CoefMatrix B_hat;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<int> active_rows;          // 1-based covariate indices
  std::vector<FusedGroup> fused_groups;  // partition of {1..p}
  std::vector<std::pair<int, double>> trace;
};

/// Scale-relative zero threshold: tau = zero_tau * max(1, ||B||_inf).
double zero_threshold(const Matrix& B, double zero_tau);

/// Validating entry point mirroring Dataset::validate; kept as a free
/// function so callers holding raw matrices do not need the class spelling.
inline Dataset validate_dataset(Matrix Y, Matrix X, bool intercept_expected) {
  return Dataset::validate(std::move(Y), std::move(X), intercept_expected);
}

}  // namespace flad
