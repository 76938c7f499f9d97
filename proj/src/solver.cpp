#include "flad/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>

#include "flad/augment.hpp"
#include "flad/objective.hpp"

namespace flad {

namespace {

// Solve A x = rhs for symmetric positive semidefinite A, adding the ridge
// floor 1e-10*trace(A) if the plain factorization is unusable.
Matrix solve_spd(const Matrix& A, const Matrix& rhs) {
  auto acceptable = [&](const Matrix& sol) {
    if (!sol.allFinite()) {
      return false;
    }
    const double resid = (A * sol - rhs).norm();
    return resid <= 1e-8 * (rhs.norm() + A.norm() * sol.norm()) + 1e-300;
  };
  Eigen::LDLT<Matrix> ldlt(A);
  Matrix sol = ldlt.solve(rhs);
  if (acceptable(sol)) {
    return sol;
  }
  Matrix floored = A;
  floored.diagonal().array() += 1e-10 * A.trace();
  ldlt.compute(floored);
  sol = ldlt.solve(rhs);
  if (!acceptable(sol)) {
    throw RankDeficient("weighted normal equations singular after ridge floor");
  }
  return sol;
}

double mean_lad(const Dataset& prob, const Matrix& B) {
  return (prob.Y() - prob.X() * B).rowwise().norm().sum() /
         static_cast<double>(prob.n());
}

struct EngineResult {
  Matrix B;
  double objective = 0.0;  // mean residual norm
  int iterations = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> trace;
};

// Backtrack from B toward B_prop until the objective decreases; the IRLS
// step majorizes a smoothed objective, so the raw objective can tick up
// near kinks. Returns false if no step length gives a decrease.
bool accept_step(const Dataset& prob, Matrix& B, double& f, const Matrix& B_prop) {
  double t = 1.0;
  for (int halvings = 0; halvings < 40; ++halvings) {
    const Matrix B_try = B + t * (B_prop - B);
    const double f_try = mean_lad(prob, B_try);
    if (f_try < f) {
      B = B_try;
      f = f_try;
      return true;
    }
    t *= 0.5;
  }
  return false;
}

void newton_refine(const Dataset& prob, const SolverConfig& cfg, EngineResult& er) {
  const Index q = prob.q();
  const Index dim = prob.X().cols() * q;
  const double n = static_cast<double>(prob.n());
  const CoefMatrix wrap0(er.B);
  Matrix H = lad_hessian(prob, wrap0) / n;
  if (H.cwiseAbs().maxCoeff() <= 1e-12) {
    return;  // piecewise-linear objective (q = 1): no curvature to use
  }
  for (int it = 0; it < 100; ++it) {
    const CoefMatrix wrap(er.B);
    const Matrix G = lad_gradient(prob, wrap) / n;
    if (it > 0) {
      H = lad_hessian(prob, wrap) / n;
    }
    // both the Hessian and this stacking follow the vec(B') ordering
    Vector gr(dim);
    for (Index j = 0; j < G.rows(); ++j) {
      gr.segment(j * q, q) = G.row(j).transpose();
    }
    Vector d;
    {
      Matrix reg = H;
      reg.diagonal().array() += 1e-12 * (1.0 + H.trace() / static_cast<double>(dim));
      Eigen::LDLT<Matrix> ldlt(reg);
      d = ldlt.solve(-gr);
    }
    if (!d.allFinite() || gr.dot(d) >= 0.0) {
      return;
    }
    Matrix Dmat(G.rows(), q);
    for (Index j = 0; j < G.rows(); ++j) {
      Dmat.row(j) = d.segment(j * q, q).transpose();
    }
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      const Matrix B_try = er.B + t * Dmat;
      const double f_try = mean_lad(prob, B_try);
      if (f_try < er.objective) {
        const double decrease = er.objective - f_try;
        er.B = B_try;
        er.objective = f_try;
        ++er.iterations;
        er.trace.emplace_back(er.iterations, f_try);
        accepted = true;
        if (decrease <= cfg.tol_rel * std::max(1.0, std::abs(f_try))) {
          er.converged = true;
          return;
        }
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      return;
    }
  }
}

EngineResult minimize_lad(const Matrix& Y, const Matrix& X, const SolverConfig& cfg,
                          const Matrix* init) {
  const Dataset prob = Dataset::augmented(Y, X);
  const Index rows = Y.rows();

  EngineResult er;
  if (init != nullptr) {
    er.B = *init;
  } else {
    er.B = solve_spd(X.transpose() * X, X.transpose() * Y);
  }
  er.objective = mean_lad(prob, er.B);
  er.trace.emplace_back(0, er.objective);

  // residual-norm floors are annealed toward eps_smooth; starting sharp can
  // pin the iterate to a wrong vertex of the piecewise-linear objective
  std::vector<double> ladder;
  for (double eps = 1e-2; eps > cfg.eps_smooth * 10.0; eps *= 1e-2) {
    ladder.push_back(eps);
  }
  ladder.push_back(cfg.eps_smooth);

  Vector sw(rows);
  for (const double eps : ladder) {
    bool phase_converged = false;
    while (!phase_converged && er.iterations < cfg.max_iter) {
      const Matrix R = Y - X * er.B;
      for (Index i = 0; i < rows; ++i) {
        sw(i) = 1.0 / std::sqrt(std::max(R.row(i).norm(), eps));
      }
      // weighted least squares via QR on the row-scaled system; the penalty
      // pseudo-rows make the normal equations too ill-conditioned to form
      const Eigen::ColPivHouseholderQR<Matrix> qr(sw.asDiagonal() * X);
      Matrix B_prop = qr.solve(sw.asDiagonal() * Y);
      if (!B_prop.allFinite()) {
        const Matrix Xw = sw.asDiagonal() * X;
        B_prop = solve_spd(Xw.transpose() * Xw,
                           Xw.transpose() * (sw.asDiagonal() * Y));
      }
      const double f_prev = er.objective;
      if (!accept_step(prob, er.B, er.objective, B_prop)) {
        phase_converged = true;  // no descent left along this direction
        break;
      }
      ++er.iterations;
      er.trace.emplace_back(er.iterations, er.objective);
      phase_converged =
          f_prev - er.objective <= cfg.tol_rel * std::max(1.0, std::abs(f_prev));
    }
    er.converged = phase_converged;
  }
  if (cfg.newton_refine) {
    newton_refine(prob, cfg, er);
  }
  return er;
}

FitResult finish_fit(const Dataset& data, const PenaltySpec& pen,
                     const SolverConfig& cfg, EngineResult er, double scale) {
  FitResult fr;
  fr.B_hat = CoefMatrix(std::move(er.B));
  fr.iterations = er.iterations;
  fr.converged = er.converged;
  fr.trace = std::move(er.trace);
  for (auto& [it, f] : fr.trace) {
    f /= scale;
  }
  fr.objective = fused_ladlasso_objective(data, fr.B_hat, pen);
  Structure s = extract_structure(fr, pen, cfg.zero_tau);
  fr.active_rows = std::move(s.active_rows);
  fr.fused_groups = std::move(s.fused_groups);
  return fr;
}

}  // namespace

CoefMatrix fit_ols(const Dataset& data) {
  return CoefMatrix(solve_spd(data.X().transpose() * data.X(),
                              data.X().transpose() * data.Y()));
}

FitResult fit_lad(const Dataset& data, const SolverConfig& cfg, const Matrix* init) {
  EngineResult er = minimize_lad(data.Y(), data.X(), cfg, init);
  const Index p = data.p();
  return finish_fit(data, PenaltySpec::all(p, 0.0, 0.0), cfg, std::move(er), 1.0);
}

FitResult fit_lad_lasso(const Dataset& data, const std::vector<int>& gamma,
                        double lambda1, const SolverConfig& cfg, const Matrix* init) {
  const AugmentedProblem ap = augment_ladlasso(data, gamma, lambda1);
  EngineResult er = minimize_lad(ap.star.Y(), ap.star.X(), cfg, init);
  return finish_fit(data, ap.source_pen, cfg, std::move(er), ap.scale);
}

FitResult fit_fused_lad_lasso(const Dataset& data, const PenaltySpec& pen,
                              const SolverConfig& cfg, const Matrix* init) {
  const AugmentedProblem ap = augment_fused(data, pen);
  EngineResult er = minimize_lad(ap.star.Y(), ap.star.X(), cfg, init);
  return finish_fit(data, pen, cfg, std::move(er), ap.scale);
}

FitResult fit_fused_sq(const Dataset& data, const PenaltySpec& pen,
                       const SolverConfig& cfg) {
  const Index p = data.p();
  const double n = static_cast<double>(data.n());
  const Matrix XtX = data.X().transpose() * data.X();
  const Matrix XtY = data.X().transpose() * data.Y();
  const FusedStructure fs = FusedStructure::build(p, pen);

  Matrix B = solve_spd(XtX, XtY);
  CoefMatrix wrap(B);
  double f = fused_lasso_objective_sq(data, wrap, pen);

  FitResult fr;
  fr.trace.emplace_back(0, f);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    // quadratic majorization of both penalties around the current iterate;
    // all outcome coordinates share one (p+1) x (p+1) system
    Matrix M = (2.0 / n) * XtX;
    for (Index j = 1; j <= p; ++j) {
      if (pen.gamma[static_cast<std::size_t>(j - 1)] != 0 && pen.lambda1 > 0.0) {
        M(j, j) += pen.lambda1 / std::max(B.row(j).norm(), cfg.eps_smooth);
      }
    }
    if (pen.lambda2 > 0.0 && p >= 2) {
      Vector wdiff = Vector::Zero(p - 1);
      for (Index k = 1; k <= p - 1; ++k) {
        if (pen.delta[static_cast<std::size_t>(k - 1)] != 0) {
          wdiff(k - 1) = pen.lambda2 /
                         std::max((B.row(k + 1) - B.row(k)).norm(), cfg.eps_smooth);
        }
      }
      M += fs.W.transpose() * wdiff.asDiagonal() * fs.W;
    }
    const Matrix B_prop = solve_spd(M, (2.0 / n) * XtY);

    double t = 1.0;
    bool accepted = false;
    const double f_prev = f;
    for (int halvings = 0; halvings < 40; ++halvings) {
      const Matrix B_try = B + t * (B_prop - B);
      const double f_try = fused_lasso_objective_sq(data, CoefMatrix(B_try), pen);
      if (f_try < f) {
        B = B_try;
        f = f_try;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      fr.converged = true;
      fr.iterations = it - 1;
      break;
    }
    fr.iterations = it;
    fr.trace.emplace_back(it, f);
    if (f_prev - f <= cfg.tol_rel * std::max(1.0, std::abs(f_prev))) {
      fr.converged = true;
      break;
    }
  }
  fr.B_hat = CoefMatrix(std::move(B));
  fr.objective = fused_lasso_objective_sq(data, fr.B_hat, pen);
  Structure s = extract_structure(fr, pen, cfg.zero_tau);
  fr.active_rows = std::move(s.active_rows);
  fr.fused_groups = std::move(s.fused_groups);
  return fr;
}

Structure extract_structure(const FitResult& fit, const PenaltySpec& pen,
                            double zero_tau) {
  const Matrix& B = fit.B_hat.B;
  const Index p = fit.B_hat.p();
  const double tau = zero_threshold(B, zero_tau);

  Structure s;
  for (Index j = 1; j <= p; ++j) {
    if (B.row(j).norm() > tau) {
      s.active_rows.push_back(static_cast<int>(j));
    }
  }
  int start = 1;
  for (Index j = 1; j <= p; ++j) {
    const bool fuse_next =
        j < p && !pen.delta.empty() &&
        pen.delta[static_cast<std::size_t>(j - 1)] != 0 &&
        (B.row(j + 1) - B.row(j)).norm() < tau;
    if (!fuse_next) {
      s.fused_groups.push_back({start, static_cast<int>(j)});
      start = static_cast<int>(j) + 1;
    }
  }
  return s;
}

}  // namespace flad
