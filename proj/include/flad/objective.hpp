#pragma once

#include <vector>

#include "flad/model.hpp"

namespace flad {

/// Spatial sign u(v): v/||v|| for nonzero v, the zero vector otherwise.
Vector spatial_sign(const Vector& v);

/// Matrix whose rows are the spatial signs of the rows of M.
Matrix spatial_sign_rows(const Matrix& M);

/// Rows whose residual norm fell below the singularity threshold and were
/// assigned the zero subgradient (gradient) or skipped (Hessian).
struct KinkReport {
  std::vector<Index> rows;

  bool any() const { return !rows.empty(); }
};

/// Threshold under which a norm argument counts as a kink:
/// eps = 1e-10 * (1 + median residual norm).
double kink_threshold(const Matrix& residuals);

/// w(B) = sum_i ||y_i - B'x_i||, unnormalized.
double lad_objective(const Dataset& data, const CoefMatrix& B);

/// Gradient of w: -X'U with U the spatial signs of the residual rows.
/// Rows with ||r_i|| below the kink threshold contribute a zero row of U
/// (a valid subgradient choice) and are listed in `report` when given.
Matrix lad_gradient(const Dataset& data, const CoefMatrix& B,
                    KinkReport* report = nullptr);

/// Hessian of w with respect to vec(B'), ((p+1)q) x ((p+1)q):
///   H = sum_i ||r_i||^-1 (x_i x_i') kron (I_q - u_i u_i').
/// Symmetric positive semidefinite; rows below the kink threshold are
/// skipped and listed in `report`.
Matrix lad_hessian(const Dataset& data, const CoefMatrix& B,
                   KinkReport* report = nullptr);

/// g(B) = sum_{j=1..p} gamma_j ||beta_j|| (intercept row excluded).
double group_penalty(const CoefMatrix& B, const std::vector<int>& gamma);

/// h(B) = sum_{k=1..p-1} delta_k ||beta_{k+1} - beta_k||. Returns 0 when
/// p < 2 (no differences exist).
double fusion_penalty(const CoefMatrix& B, const std::vector<int>& delta);

/// (1/n) w(B) + lambda1 g(B) + lambda2 h(B).
double fused_ladlasso_objective(const Dataset& data, const CoefMatrix& B,
                                const PenaltySpec& pen);

/// Squared-loss variant: (1/n) sum_i ||y_i - B'x_i||^2 + penalties.
double fused_lasso_objective_sq(const Dataset& data, const CoefMatrix& B,
                                const PenaltySpec& pen);

/// Subgradient of the squared-loss fused objective with respect to B:
///   -(2/n)(X'Y - X'XB) + lambda1 diag(gamma) U(B) + lambda2 A U(W B)
/// using the extended difference matrix (see ext_difference_matrix) inside
/// the fusion term. Zero-norm rows/differences use the zero subgradient and
/// are listed in `report`.
Matrix fused_lasso_gradient_sq(const Dataset& data, const CoefMatrix& B,
                               const PenaltySpec& pen,
                               KinkReport* report = nullptr);

/// Difference and selection matrices induced by a penalty spec.
struct FusedStructure {
  Matrix W;   // (p-1) x (p+1): row k is beta_{k+1} - beta_k, intercept column zero
  Matrix A1;  // d1 x (p+1): selects penalized covariate rows
  Matrix A2;  // d2 x (p-1): selects penalized difference rows of W
  Matrix A;   // (p+1) x p: stacked-difference adjoint [0'; D] - [D; 0']
  Matrix D;   // p x p: diag(0, delta_1, ..., delta_{p-1})

  static FusedStructure build(Index p, const PenaltySpec& pen);
};

/// First-difference matrix including the intercept difference row,
/// p x (p+1): [0_p I_p] - [I_p 0_p]. Row j of (result * B) is
/// (beta_{j+1} - beta_j)' for j = 0..p-1 counting the intercept as beta_0.
Matrix ext_difference_matrix(Index p);

}  // namespace flad
