#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "flad/model.hpp"

namespace flad {

/// Synthetic design: AR(1) covariate blocks with unit marginal variance,
/// correlated Gaussian errors, block-constant signal coefficients and
/// standard-normal noise coefficients everywhere else.
struct SimSpec {
  struct Block {
    int first = 0;  // 1-based covariate indices, inclusive
    int last = 0;
    double phi = 0.0;
  };

  int n = 200;
  int q = 2;
  int p = 50;
  Matrix error_cov;                   // q x q SPD; defaults to [[1,.7],[.7,1]]
  std::vector<Block> blocks;          // defaults to (11..15, .9), (21..25, .5)
  std::map<int, Vector> signal_rows;  // defaults to the block-constant design
  std::uint64_t seed = 0;

  /// Defaults above, with the given seed.
  static SimSpec defaults(std::uint64_t seed = 0);

  /// Indices 1..p carrying designated signal (keys of signal_rows).
  std::vector<int> signal_indices() const;
};

struct SimData {
  Dataset data;
  CoefMatrix B_true;
};

/// Draw a dataset from the spec. Deterministic per seed.
SimData generate(const SimSpec& spec);

/// Corrupt a seeded random subset of response rows by adding `magnitude` to
/// every outcome. Used by robustness checks.
Dataset inject_outliers(const Dataset& data, double fraction, double magnitude,
                        std::uint64_t seed);

struct RecoveryMetrics {
  double rmse_signal = 0.0;            // over designated signal rows
  double block_spread = 0.0;           // max per-coordinate spread within a block
  double block_spread_thresholded = 0.0;  // 0 when a whole block is fused
  int false_active = 0;                // active rows outside the signal set
  bool blocks_fused = false;           // every block collapsed to one group
};

/// Quantify how well B_hat recovers the generating coefficients.
RecoveryMetrics score_recovery(const CoefMatrix& B_hat, const CoefMatrix& B_true,
                               double zero_tau, const SimSpec& spec);

}  // namespace flad
