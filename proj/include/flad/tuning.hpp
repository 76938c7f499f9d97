#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flad/model.hpp"
#include "flad/solver.hpp"

namespace flad {

/// K-fold plan: seeded shuffled contiguous blocks plus the (lambda1, lambda2)
/// search grids (stored sorted ascending, duplicates removed).
struct CvPlan {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<int> fold_assignment;  // length n, values in 0..k-1
  std::vector<double> lambda1_grid;
  std::vector<double> lambda2_grid;

  static CvPlan make(Index n, int k, std::uint64_t seed,
                     std::vector<double> lambda1_grid,
                     std::vector<double> lambda2_grid);

  /// Deterministic function of (n, k, seed) only.
  static std::vector<int> make_assignment(Index n, int k, std::uint64_t seed);
};

struct CvSurface {
  std::vector<double> lambda1_grid;
  std::vector<double> lambda2_grid;
  Matrix errors;                 // |grid1| x |grid2|, NaN marks a failed point
  std::vector<Matrix> per_fold;  // k matrices of per-fold held-out means
  Index best_i = -1;
  Index best_j = -1;
  double best_lambda1 = 0.0;
  double best_lambda2 = 0.0;
  double best_error = 0.0;
  std::vector<std::string> failures;
};

/// Mean over all n held-out observations of ||y_i - B_(-fold)' x_i||.
double cv_error(const Dataset& data, const PenaltySpec& pen, const CvPlan& plan,
                const SolverConfig& cfg = {});

/// Evaluate cv_error over the full Cartesian grid, warm-starting along
/// increasing lambda2 within each lambda1. Failed points are recorded and
/// excluded from the argmin; ties break toward larger (lambda1, lambda2).
/// `threads` = 0 picks the hardware concurrency.
CvSurface grid_search(const Dataset& data, const std::vector<int>& gamma,
                      const std::vector<int>& delta, const CvPlan& plan,
                      const SolverConfig& cfg = {}, unsigned threads = 0);

}  // namespace flad
