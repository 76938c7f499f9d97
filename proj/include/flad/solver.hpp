#pragma once

#include <cstdint>
#include <vector>

#include "flad/model.hpp"

namespace flad {

struct SolverConfig {
  int max_iter = 500;
  double tol_rel = 1e-8;      // relative objective decrease
  double eps_smooth = 1e-8;   // residual-norm floor in IRLS weights
  double zero_tau = 1e-6;     // scale-relative zero threshold
  bool newton_refine = true;
  std::uint64_t seed = 0;     // reserved for tie-breaking; the convex path never draws
};

/// Ordinary least squares estimate, ridge-floored when X'X is near-singular.
CoefMatrix fit_ols(const Dataset& data);

/// Minimize the mean residual norm (1/n) sum_i ||y_i - B'x_i|| by smoothed
/// IRLS from the OLS start, optionally followed by damped Newton steps.
/// Accepts any design matrix, including intercept-only and augmented ones.
/// `init` overrides the OLS start (warm starts along tuning paths).
FitResult fit_lad(const Dataset& data, const SolverConfig& cfg = {},
                  const Matrix* init = nullptr);

/// Group LAD-lasso via augmentation + fit_lad. Objective is reported in the
/// original normalization: (1/n) sum ||r_i|| + lambda1 sum gamma_j ||beta_j||.
FitResult fit_lad_lasso(const Dataset& data, const std::vector<int>& gamma,
                        double lambda1, const SolverConfig& cfg = {},
                        const Matrix* init = nullptr);

/// Fused group LAD-lasso via augmentation + fit_lad.
FitResult fit_fused_lad_lasso(const Dataset& data, const PenaltySpec& pen,
                              const SolverConfig& cfg = {},
                              const Matrix* init = nullptr);

/// Squared-loss fused lasso fit (quadratic majorization of both penalties;
/// each step solves (p+1)-dimensional normal equations). The non-robust
/// counterpart used for comparisons.
FitResult fit_fused_sq(const Dataset& data, const PenaltySpec& pen,
                       const SolverConfig& cfg = {});

struct Structure {
  std::vector<int> active_rows;
  std::vector<FusedGroup> fused_groups;
};

/// Threshold the fit into an active set and fused groups. A run extends
/// across k -> k+1 iff the difference is penalized (delta_k = 1) and
/// ||beta_{k+1} - beta_k|| falls below the scale-relative threshold.
Structure extract_structure(const FitResult& fit, const PenaltySpec& pen,
                            double zero_tau);

}  // namespace flad
