#pragma once

#include "flad/model.hpp"

namespace flad {

/// Penalized problem rewritten as a pure LAD problem: penalty terms become
/// pseudo-observations with zero responses and scaled design rows, so
///   (1/(n+d1+d2)) sum ||y*_i - B'x*_i|| = scale * penalized objective
/// for every B, with scale = n/(n+d1+d2).
struct AugmentedProblem {
  Dataset star;  // Ystar (n+d1+d2) x q, Xstar (n+d1+d2) x (p+1)
  int d1 = 0;
  int d2 = 0;
  double scale = 1.0;
  PenaltySpec source_pen;
};

/// Group-penalty augmentation: appends a row n*lambda1*(0, e_j') for each
/// penalized covariate j. lambda1 = 0 returns the problem unaugmented.
AugmentedProblem augment_ladlasso(const Dataset& data,
                                  const std::vector<int>& gamma,
                                  double lambda1);

/// Full fused augmentation: group rows as above plus a row n*lambda2*(row k
/// of W) for each penalized difference k. Zero-lambda blocks produce no
/// rows. Throws DegenerateP if differences are requested with p < 2.
AugmentedProblem augment_fused(const Dataset& data, const PenaltySpec& pen);

}  // namespace flad
