#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "flad/objective.hpp"
#include "flad/solver.hpp"
#include "support/oracles.hpp"

using namespace flad;

TEST_SUITE("objective") {

TEST_CASE("spatial sign definition") {
  Vector zero(2);
  zero << 0.0, 0.0;
  CHECK(spatial_sign(zero) == Vector::Zero(2));

  Vector v(2);
  v << 3.0, 4.0;
  const Vector u = spatial_sign(v);
  CHECK(u(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(u(1) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("spatial sign norm is 0 or 1 and scale invariant") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector v = oracle::random_matrix(rng, 4, 1).col(0);
    const Vector u = spatial_sign(v);
    CHECK(u.norm() == doctest::Approx(v.norm() == 0.0 ? 0.0 : 1.0).epsilon(1e-12));
    const double c = 0.01 + 10.0 * rng.uniform();
    CHECK((spatial_sign(c * v) - u).norm() < 1e-12);
  }
}

TEST_CASE("lad objective at B = 0 sums response norms") {
  Rng rng(12);
  const auto inst = oracle::random_instance(rng, 6, 3, 2);
  const CoefMatrix zero(Matrix::Zero(4, 2));
  CHECK(lad_objective(inst.data, zero) ==
        doctest::Approx(inst.data.Y().rowwise().norm().sum()).epsilon(1e-14));
}

TEST_CASE("lad objective vanishes on an exact fit") {
  Rng rng(13);
  Matrix X(5, 3);
  X.col(0).setOnes();
  X.rightCols(2) = oracle::random_matrix(rng, 5, 2);
  const CoefMatrix B0(oracle::random_matrix(rng, 3, 2));
  const Dataset d = Dataset::validate(X * B0.B, X, true);
  CHECK(lad_objective(d, B0) == doctest::Approx(0.0));
}

TEST_CASE("lad objective matches the row-by-row oracle") {
  Rng rng(14);
  const auto inst = oracle::random_instance(rng, 5, 3, 2);
  const double got = lad_objective(inst.data, inst.B);
  const double want = oracle::lad_sum(inst.data.Y(), inst.data.X(), inst.B.B);
  CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
}

TEST_CASE("lad gradient is zero (and flagged) on an exact fit") {
  Rng rng(15);
  Matrix X(4, 3);
  X.col(0).setOnes();
  X.rightCols(2) = oracle::random_matrix(rng, 4, 2);
  const CoefMatrix B0(oracle::random_matrix(rng, 3, 2));
  const Dataset d = Dataset::validate(X * B0.B, X, true);
  KinkReport report;
  const Matrix G = lad_gradient(d, B0, &report);
  CHECK(G.cwiseAbs().maxCoeff() == 0.0);
  CHECK(report.rows.size() == 4);
}

TEST_CASE("lad gradient with q=1 and positive residuals is -X' 1") {
  Rng rng(16);
  Matrix X(6, 3);
  X.col(0).setOnes();
  X.rightCols(2) = oracle::random_matrix(rng, 6, 2);
  const CoefMatrix B(Matrix::Zero(3, 1));
  Matrix Y(6, 1);
  Y.setConstant(5.0);  // all residuals positive at B = 0
  const Dataset d = Dataset::validate(Y, X, true);
  const Matrix G = lad_gradient(d, B);
  const Matrix want = -X.transpose() * Matrix::Ones(6, 1);
  CHECK((G - want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("lad gradient matches finite differences at smooth points") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::smooth_instance(seed, 12, 3, 2);
    const Matrix G = lad_gradient(inst.data, inst.B);
    const Matrix Gfd = oracle::fd_gradient(
        [&](const Matrix& B) {
          return oracle::lad_sum(inst.data.Y(), inst.data.X(), B);
        },
        inst.B.B);
    CHECK(oracle::rel_err(G, Gfd) < 1e-6);
  }
}

TEST_CASE("lad hessian is identically zero for q=1") {
  const auto inst = oracle::smooth_instance(21, 10, 3, 1);
  const Matrix H = lad_hessian(inst.data, inst.B);
  CHECK(H.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lad hessian of a single observation has rank at most p+1") {
  const auto inst = oracle::smooth_instance(22, 1, 2, 2);
  const Matrix H = lad_hessian(inst.data, inst.B);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
  int rank = 0;
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > 1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff()) {
      ++rank;
    }
  }
  CHECK(rank <= 3);  // (p+1) * rank(I_2 - uu') = (p+1) * 1
}

TEST_CASE("lad hessian matches finite differences of the gradient") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = oracle::smooth_instance(seed + 100, 10, 2, 2);
    const Matrix H = lad_hessian(inst.data, inst.B);
    const Matrix Hfd = oracle::fd_hessian(
        [&](const Matrix& B) {
          return lad_gradient(inst.data, CoefMatrix(B));
        },
        inst.B.B);
    CHECK(oracle::rel_err(H, Hfd) < 1e-5);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * H.norm());
  }
}

TEST_CASE("group penalty basics and oracle agreement") {
  Rng rng(31);
  const CoefMatrix zero(Matrix::Zero(4, 2));
  CHECK(group_penalty(zero, {1, 1, 1}) == 0.0);

  const CoefMatrix B(oracle::random_matrix(rng, 4, 2));
  CHECK(group_penalty(B, {0, 0, 0}) == 0.0);
  const double got = group_penalty(B, {1, 1, 1});
  const double want = oracle::group_sum(B.B, {1, 1, 1});
  CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, want));
}

TEST_CASE("fusion penalty basics") {
  Matrix B(3, 2);
  B << 1.0, 2.0, 4.0, -1.0, 4.0, -1.0;  // rows 1 and 2 equal
  CHECK(fusion_penalty(CoefMatrix(B), {1}) == 0.0);

  Matrix B2(3, 2);
  B2 << 0.0, 0.0, 1.0, 1.0, 4.0, 5.0;  // difference (3,4)
  CHECK(fusion_penalty(CoefMatrix(B2), {1}) == doctest::Approx(5.0).epsilon(1e-14));

  // constant shift of every row leaves differences unchanged
  Rng rng(32);
  const Matrix B3 = oracle::random_matrix(rng, 5, 2);
  Matrix shifted = B3;
  Eigen::RowVectorXd shift(2);
  shift << 3.25, -1.5;
  for (Index j = 1; j < 5; ++j) {
    shifted.row(j) += shift;
  }
  CHECK(fusion_penalty(CoefMatrix(B3), {1, 0, 1}) ==
        doctest::Approx(fusion_penalty(CoefMatrix(shifted), {1, 0, 1})).epsilon(1e-12));
}

TEST_CASE("fusion penalty with p=1 is zero") {
  Matrix B(2, 2);
  B << 1.0, 2.0, 3.0, 4.0;
  CHECK(fusion_penalty(CoefMatrix(B), {}) == 0.0);
}

TEST_CASE("fusion penalty agrees with the W-matrix route") {
  Rng rng(33);
  const Index p = 6;
  const CoefMatrix B(oracle::random_matrix(rng, p + 1, 3));
  std::vector<int> delta = {1, 0, 1, 1, 0};
  const PenaltySpec pen(std::vector<int>(p, 1), delta, 0.0, 1.0);
  const FusedStructure fs = FusedStructure::build(p, pen);

  const Matrix WB = fs.W * B.B;
  double via_w = 0.0;
  for (Index k = 0; k < WB.rows(); ++k) {
    if (delta[static_cast<std::size_t>(k)] != 0) {
      via_w += WB.row(k).norm();
    }
  }
  CHECK(fusion_penalty(B, delta) == doctest::Approx(via_w).epsilon(1e-12));
}

TEST_CASE("fused objective composes its three terms") {
  Rng rng(34);
  const auto inst = oracle::random_instance(rng, 8, 4, 2);
  const PenaltySpec pen({1, 0, 1, 1}, {1, 1, 0}, 0.3, 0.7);

  const double got = fused_ladlasso_objective(inst.data, inst.B, pen);
  const double want =
      oracle::fused_objective(inst.data.Y(), inst.data.X(), inst.B.B, pen);
  CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));

  const PenaltySpec free({1, 0, 1, 1}, {1, 1, 0}, 0.0, 0.0);
  CHECK(fused_ladlasso_objective(inst.data, inst.B, free) ==
        doctest::Approx(lad_objective(inst.data, inst.B) / 8.0).epsilon(1e-14));

  const CoefMatrix zero(Matrix::Zero(5, 2));
  CHECK(fused_ladlasso_objective(inst.data, zero, pen) ==
        doctest::Approx(inst.data.Y().rowwise().norm().sum() / 8.0).epsilon(1e-14));
}

TEST_CASE("fused objective is monotone in the tuning values") {
  Rng rng(35);
  const auto inst = oracle::random_instance(rng, 8, 4, 2);
  const std::vector<int> gamma{1, 1, 1, 1};
  const std::vector<int> delta{1, 1, 1};
  double prev = fused_ladlasso_objective(inst.data, inst.B,
                                         PenaltySpec(gamma, delta, 0.0, 0.0));
  for (double lambda : {0.1, 0.5, 2.0, 10.0}) {
    const double along_l1 = fused_ladlasso_objective(
        inst.data, inst.B, PenaltySpec(gamma, delta, lambda, 0.0));
    const double along_both = fused_ladlasso_objective(
        inst.data, inst.B, PenaltySpec(gamma, delta, lambda, lambda));
    CHECK(along_l1 >= prev);
    CHECK(along_both >= along_l1);
    prev = along_l1;
  }
}

TEST_CASE("lad objective is convex along segments") {
  Rng rng(36);
  const auto inst = oracle::random_instance(rng, 10, 3, 2);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix B1 = oracle::random_matrix(rng, 4, 2);
    const Matrix B2 = oracle::random_matrix(rng, 4, 2);
    const double t = rng.uniform();
    const double mid =
        lad_objective(inst.data, CoefMatrix(t * B1 + (1.0 - t) * B2));
    const double chord = t * lad_objective(inst.data, CoefMatrix(B1)) +
                         (1.0 - t) * lad_objective(inst.data, CoefMatrix(B2));
    CHECK(mid <= chord + 1e-10);
  }
}

TEST_CASE("squared-loss objective matches the trace identity") {
  Rng rng(37);
  const auto inst = oracle::random_instance(rng, 9, 3, 2);
  const PenaltySpec pen({1, 1, 0}, {1, 0}, 0.4, 0.6);
  const Matrix R = inst.data.Y() - inst.data.X() * inst.B.B;
  const double want = (R * R.transpose()).trace() / 9.0 +
                      0.4 * oracle::group_sum(inst.B.B, pen.gamma) +
                      0.6 * oracle::fusion_sum(inst.B.B, pen.delta);
  const double got = fused_lasso_objective_sq(inst.data, inst.B, pen);
  CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));

  const CoefMatrix zero(Matrix::Zero(4, 2));
  CHECK(fused_lasso_objective_sq(inst.data, zero, pen) ==
        doctest::Approx(inst.data.Y().array().square().sum() / 9.0).epsilon(1e-12));
}

TEST_CASE("squared loss is minimal at the OLS solution when unpenalized") {
  Rng rng(38);
  const auto inst = oracle::random_instance(rng, 12, 3, 2);
  const PenaltySpec free({1, 1, 1}, {1, 1}, 0.0, 0.0);
  const CoefMatrix ols = fit_ols(inst.data);
  const double fmin = fused_lasso_objective_sq(inst.data, ols, free);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix perturbed = ols.B + 0.1 * oracle::random_matrix(rng, 4, 2);
    CHECK(fused_lasso_objective_sq(inst.data, CoefMatrix(perturbed), free) >=
          fmin - 1e-12);
  }
}

TEST_CASE("squared-loss gradient: unpenalized form and OLS stationarity") {
  Rng rng(39);
  const auto inst = oracle::random_instance(rng, 10, 3, 2);
  const PenaltySpec free({1, 1, 1}, {1, 1}, 0.0, 0.0);
  const Matrix G = fused_lasso_gradient_sq(inst.data, inst.B, free);
  const Matrix want = -(2.0 / 10.0) * (inst.data.X().transpose() * inst.data.Y() -
                                       inst.data.X().transpose() * inst.data.X() *
                                           inst.B.B);
  CHECK((G - want).cwiseAbs().maxCoeff() < 1e-12);

  const CoefMatrix ols = fit_ols(inst.data);
  CHECK(fused_lasso_gradient_sq(inst.data, ols, free).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("squared-loss gradient matches finite differences at smooth points") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto inst = oracle::smooth_instance(seed + 200, 10, 4, 2);
    const PenaltySpec pen({1, 1, 0, 1}, {1, 0, 1}, 0.35, 0.55);
    const Matrix G = fused_lasso_gradient_sq(inst.data, inst.B, pen);
    const Matrix Gfd = oracle::fd_gradient(
        [&](const Matrix& B) {
          const Matrix R = inst.data.Y() - inst.data.X() * B;
          return R.squaredNorm() / 10.0 + 0.35 * oracle::group_sum(B, pen.gamma) +
                 0.55 * oracle::fusion_sum(B, pen.delta);
        },
        inst.B.B);
    CHECK(oracle::rel_err(G, Gfd) < 1e-6);
  }
}

TEST_CASE("squared-loss gradient matches the vectorized Kronecker display") {
  const auto inst = oracle::smooth_instance(42, 9, 3, 2);
  const Index p = 3, q = 2;
  const PenaltySpec pen({1, 1, 1}, {1, 1}, 0.3, 0.8);
  const Matrix G = fused_lasso_gradient_sq(inst.data, inst.B, pen);

  // vec(B') stacking
  auto vec_rows = [&](const Matrix& M) {
    Vector v(M.rows() * M.cols());
    for (Index j = 0; j < M.rows(); ++j) {
      v.segment(j * M.cols(), M.cols()) = M.row(j).transpose();
    }
    return v;
  };
  const Matrix Iq = Matrix::Identity(q, q);
  const Matrix XkI = Eigen::kroneckerProduct(inst.data.X(), Iq);
  const Vector y = vec_rows(inst.data.Y());
  const Vector beta = vec_rows(inst.B.B);

  // data term: -2/n [(X' kron I) y - (X'X kron I) beta]
  Vector want = -(2.0 / 9.0) * (XkI.transpose() * y -
                                Eigen::kroneckerProduct(
                                    inst.data.X().transpose() * inst.data.X(), Iq) *
                                    beta);
  // group term: vec(U(B)' diag(gamma))
  Matrix diag_gamma = Matrix::Zero(p + 1, p + 1);
  for (Index j = 1; j <= p; ++j) {
    diag_gamma(j, j) = pen.gamma[static_cast<std::size_t>(j - 1)];
  }
  want += 0.3 * vec_rows(diag_gamma * spatial_sign_rows(inst.B.B));
  // fusion term: vec(U(WB)' A')
  const FusedStructure fs = FusedStructure::build(p, pen);
  const Matrix Wext = ext_difference_matrix(p);
  want += 0.8 * vec_rows(fs.A * spatial_sign_rows(Wext * inst.B.B));

  CHECK((vec_rows(G) - want).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fused structure matrices have the documented shape") {
  const Index p = 5;
  const PenaltySpec pen({1, 0, 1, 1, 0}, {1, 1, 0, 1}, 0.1, 0.2);
  const FusedStructure fs = FusedStructure::build(p, pen);

  CHECK(fs.W.rows() == p - 1);
  CHECK(fs.W.cols() == p + 1);
  for (Index k = 0; k < p - 1; ++k) {
    CHECK(fs.W(k, 0) == 0.0);
    CHECK(fs.W(k, k + 1) == -1.0);
    CHECK(fs.W(k, k + 2) == 1.0);
    CHECK(fs.W.row(k).cwiseAbs().sum() == 2.0);
  }

  CHECK(fs.A1.rows() == 3);
  for (Index r = 0; r < fs.A1.rows(); ++r) {
    CHECK(fs.A1.row(r).sum() == 1.0);
    CHECK(fs.A1(r, 0) == 0.0);
  }
  CHECK(fs.A1(0, 1) == 1.0);
  CHECK(fs.A1(1, 3) == 1.0);
  CHECK(fs.A1(2, 4) == 1.0);

  CHECK(fs.A2.rows() == 3);
  CHECK(fs.A2(0, 0) == 1.0);
  CHECK(fs.A2(1, 1) == 1.0);
  CHECK(fs.A2(2, 3) == 1.0);

  // A = [0'; D] - [D; 0']
  Matrix want = Matrix::Zero(p + 1, p);
  want.bottomRows(p) += fs.D;
  want.topRows(p) -= fs.D;
  CHECK(fs.A == want);
  CHECK(fs.D(0, 0) == 0.0);
}

TEST_CASE("both difference-matrix conventions induce the same penalty") {
  Rng rng(43);
  const Index p = 6;
  const CoefMatrix B(oracle::random_matrix(rng, p + 1, 2));
  const std::vector<int> delta{1, 0, 1, 1, 1};
  const PenaltySpec pen(std::vector<int>(p, 1), delta, 0.0, 1.0);
  const FusedStructure fs = FusedStructure::build(p, pen);

  // extended convention: D's leading zero silences the intercept row
  const Matrix DW = fs.D * ext_difference_matrix(p) * B.B;
  double via_ext = 0.0;
  for (Index j = 0; j < DW.rows(); ++j) {
    via_ext += DW.row(j).norm();
  }
  CHECK(fusion_penalty(B, delta) == doctest::Approx(via_ext).epsilon(1e-12));
}

}  // TEST_SUITE
