#include "flad/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "flad/rng.hpp"

namespace flad {

SimSpec SimSpec::defaults(std::uint64_t seed) {
  SimSpec spec;
  spec.error_cov.resize(2, 2);
  spec.error_cov << 1.0, 0.7, 0.7, 1.0;
  spec.blocks = {{11, 15, 0.9}, {21, 25, 0.5}};
  Vector strong(2), block1(2), block2(2);
  strong << 7.0, 8.0;
  block1 << 10.0, 12.0;
  block2 << 8.0, 6.0;
  spec.signal_rows[5] = strong;
  spec.signal_rows[40] = strong;
  for (int j = 11; j <= 15; ++j) {
    spec.signal_rows[j] = block1;
  }
  for (int j = 21; j <= 25; ++j) {
    spec.signal_rows[j] = block2;
  }
  spec.seed = seed;
  return spec;
}

std::vector<int> SimSpec::signal_indices() const {
  std::vector<int> idx;
  idx.reserve(signal_rows.size());
  for (const auto& [j, v] : signal_rows) {
    idx.push_back(j);
  }
  return idx;
}

namespace {

void check_spec(const SimSpec& spec) {
  if (spec.n < 1 || spec.q < 1 || spec.p < 1) {
    throw BadSpec("n, p, q must be positive");
  }
  if (spec.error_cov.rows() != spec.q || spec.error_cov.cols() != spec.q) {
    throw BadSpec("error_cov must be q x q");
  }
  if (!spec.error_cov.isApprox(spec.error_cov.transpose())) {
    throw BadSpec("error_cov must be symmetric");
  }
  std::vector<int> owner(static_cast<std::size_t>(spec.p) + 1, -1);
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const auto& blk = spec.blocks[b];
    if (blk.first < 1 || blk.last > spec.p || blk.first > blk.last) {
      throw BadSpec("block range outside 1..p");
    }
    if (std::abs(blk.phi) >= 1.0) {
      throw BadSpec("|phi| must be < 1");
    }
    for (int j = blk.first; j <= blk.last; ++j) {
      if (owner[static_cast<std::size_t>(j)] != -1) {
        throw BadSpec("blocks overlap");
      }
      owner[static_cast<std::size_t>(j)] = static_cast<int>(b);
    }
  }
  for (const auto& [j, v] : spec.signal_rows) {
    if (j < 0 || j > spec.p) {
      throw BadSpec("signal row index outside 0..p");
    }
    if (v.size() != spec.q) {
      throw BadSpec("signal coefficient vector must have length q");
    }
  }
}

}  // namespace

SimData generate(const SimSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  const Index n = spec.n;
  const Index p = spec.p;
  const Index q = spec.q;

  // coefficients first, then design, then errors; the order is part of the
  // per-seed contract
  Matrix B(p + 1, q);
  for (Index j = 0; j <= p; ++j) {
    const auto it = spec.signal_rows.find(static_cast<int>(j));
    if (it != spec.signal_rows.end()) {
      B.row(j) = it->second.transpose();
    } else {
      for (Index l = 0; l < q; ++l) {
        B(j, l) = rng.normal();
      }
    }
  }

  // which block, if any, covers each covariate
  std::vector<const SimSpec::Block*> owner(static_cast<std::size_t>(p) + 1, nullptr);
  for (const auto& blk : spec.blocks) {
    for (int j = blk.first; j <= blk.last; ++j) {
      owner[static_cast<std::size_t>(j)] = &blk;
    }
  }

  Matrix X(n, p + 1);
  X.col(0).setOnes();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 1; j <= p; ++j) {
      const auto* blk = owner[static_cast<std::size_t>(j)];
      const double z = rng.normal();
      if (blk != nullptr && j > blk->first) {
        // stationary AR(1) across the variable index, unit marginal variance
        X(i, j) = blk->phi * X(i, j - 1) +
                  std::sqrt(1.0 - blk->phi * blk->phi) * z;
      } else {
        X(i, j) = z;
      }
    }
  }

  Eigen::LLT<Matrix> llt(spec.error_cov);
  if (llt.info() != Eigen::Success) {
    throw BadSpec("error_cov must be positive definite");
  }
  const Matrix L = llt.matrixL();
  Matrix E(n, q);
  Vector z(q);
  for (Index i = 0; i < n; ++i) {
    for (Index l = 0; l < q; ++l) {
      z(l) = rng.normal();
    }
    E.row(i) = (L * z).transpose();
  }

  Matrix Y = X * B + E;
  return SimData{Dataset::validate(std::move(Y), std::move(X), true),
                 CoefMatrix(std::move(B))};
}

Dataset inject_outliers(const Dataset& data, double fraction, double magnitude,
                        std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw BadSpec("outlier fraction must be in [0, 1]");
  }
  const auto count = static_cast<Index>(fraction * static_cast<double>(data.n()));
  Rng rng(seed);
  std::vector<Index> rows;
  while (static_cast<Index>(rows.size()) < count) {
    const Index r = static_cast<Index>(rng.below(static_cast<std::uint64_t>(data.n())));
    if (std::find(rows.begin(), rows.end(), r) == rows.end()) {
      rows.push_back(r);
    }
  }
  Matrix Y = data.Y();
  for (Index r : rows) {
    Y.row(r).array() += magnitude;
  }
  return Dataset::validate(std::move(Y), data.X(), true);
}

RecoveryMetrics score_recovery(const CoefMatrix& B_hat, const CoefMatrix& B_true,
                               double zero_tau, const SimSpec& spec) {
  if (B_hat.B.rows() != B_true.B.rows() || B_hat.B.cols() != B_true.B.cols()) {
    throw DimensionMismatch("B_hat and B_true shapes differ");
  }
  const double tau = zero_threshold(B_hat.B, zero_tau);
  RecoveryMetrics m;

  double sq_sum = 0.0;
  std::size_t count = 0;
  for (const auto& [j, v] : spec.signal_rows) {
    sq_sum += (B_hat.B.row(j) - B_true.B.row(j)).squaredNorm();
    count += static_cast<std::size_t>(B_hat.q());
  }
  m.rmse_signal = count > 0 ? std::sqrt(sq_sum / static_cast<double>(count)) : 0.0;

  m.blocks_fused = !spec.blocks.empty();
  for (const auto& blk : spec.blocks) {
    double spread = 0.0;
    for (Index l = 0; l < B_hat.q(); ++l) {
      double lo = B_hat.B(blk.first, l);
      double hi = lo;
      for (int j = blk.first; j <= blk.last; ++j) {
        lo = std::min(lo, B_hat.B(j, l));
        hi = std::max(hi, B_hat.B(j, l));
      }
      spread = std::max(spread, hi - lo);
    }
    bool fused = true;
    for (int j = blk.first; j < blk.last; ++j) {
      if ((B_hat.B.row(j + 1) - B_hat.B.row(j)).norm() >= tau) {
        fused = false;
      }
    }
    m.block_spread = std::max(m.block_spread, spread);
    m.block_spread_thresholded =
        std::max(m.block_spread_thresholded, fused ? 0.0 : spread);
    m.blocks_fused = m.blocks_fused && fused;
  }

  const auto signal = spec.signal_indices();
  for (Index j = 1; j <= B_hat.p(); ++j) {
    if (B_hat.B.row(j).norm() > tau &&
        std::find(signal.begin(), signal.end(), static_cast<int>(j)) == signal.end()) {
      ++m.false_active;
    }
  }
  return m;
}

}  // namespace flad
