#include "flad/augment.hpp"

#include <algorithm>

#include "flad/objective.hpp"

namespace flad {

AugmentedProblem augment_fused(const Dataset& data, const PenaltySpec& pen) {
  const Index n = data.n();
  const Index p = data.p();
  if (static_cast<Index>(pen.gamma.size()) != p) {
    throw DimensionMismatch("gamma must have length p");
  }
  const bool any_delta =
      std::any_of(pen.delta.begin(), pen.delta.end(), [](int d) { return d != 0; });
  if (any_delta && p < 2) {
    throw DegenerateP("difference penalties require p >= 2");
  }
  if (p >= 2 && static_cast<Index>(pen.delta.size()) != p - 1) {
    throw DimensionMismatch("delta must have length p-1");
  }

  // zero-lambda blocks are skipped entirely: emitting zero rows would
  // inflate the 1/(n+d) normalizer and break the exact scale identity
  const int d1 = pen.lambda1 > 0.0 ? pen.d1() : 0;
  const int d2 = pen.lambda2 > 0.0 ? pen.d2() : 0;

  const Index total = n + d1 + d2;
  Matrix Ystar = Matrix::Zero(total, data.q());
  Matrix Xstar = Matrix::Zero(total, p + 1);
  Ystar.topRows(n) = data.Y();
  Xstar.topRows(n) = data.X();

  const double nd = static_cast<double>(n);
  Index r = n;
  if (d1 > 0) {
    for (Index j = 1; j <= p; ++j) {
      if (pen.gamma[static_cast<std::size_t>(j - 1)] != 0) {
        Xstar(r++, j) = nd * pen.lambda1;
      }
    }
  }
  if (d2 > 0) {
    for (Index k = 1; k <= p - 1; ++k) {
      if (pen.delta[static_cast<std::size_t>(k - 1)] != 0) {
        Xstar(r, k) = -nd * pen.lambda2;
        Xstar(r, k + 1) = nd * pen.lambda2;
        ++r;
      }
    }
  }

  AugmentedProblem out{Dataset::augmented(std::move(Ystar), std::move(Xstar)),
                       d1, d2,
                       nd / static_cast<double>(total), pen};
  return out;
}

AugmentedProblem augment_ladlasso(const Dataset& data,
                                  const std::vector<int>& gamma,
                                  double lambda1) {
  std::vector<int> delta(data.p() > 1 ? static_cast<std::size_t>(data.p() - 1) : 0, 0);
  return augment_fused(data, PenaltySpec(gamma, std::move(delta), lambda1, 0.0));
}

}  // namespace flad
