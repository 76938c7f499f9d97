#include "flad/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "flad/rng.hpp"

namespace flad {

namespace {

std::vector<double> sorted_grid(std::vector<double> grid, const char* name) {
  if (grid.empty()) {
    throw BadSpec(std::string(name) + " grid must be nonempty");
  }
  if (std::any_of(grid.begin(), grid.end(),
                  [](double v) { return !(v >= 0.0) || !std::isfinite(v); })) {
    throw BadSpec(std::string(name) + " grid values must be finite and nonnegative");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::pair<std::vector<int>, std::vector<int>> split_rows(
    const std::vector<int>& assignment, int fold) {
  std::vector<int> train;
  std::vector<int> heldout;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    (assignment[i] == fold ? heldout : train).push_back(static_cast<int>(i));
  }
  return {std::move(train), std::move(heldout)};
}

// Fit on the training rows and return the summed held-out residual norms.
double fold_heldout_sum(const Dataset& data, const Dataset& train,
                        const std::vector<int>& heldout, const PenaltySpec& pen,
                        const SolverConfig& cfg, const Matrix* init,
                        Matrix* B_out) {
  if (pen.lambda1 == 0.0 && pen.lambda2 == 0.0 &&
      train.n() < train.p() + 1) {
    throw FoldTooSmall("training fold has " + std::to_string(train.n()) +
                       " rows for " + std::to_string(train.p() + 1) +
                       " columns with no penalty");
  }
  const FitResult fit = fit_fused_lad_lasso(train, pen, cfg, init);
  if (B_out != nullptr) {
    *B_out = fit.B_hat.B;
  }
  double sum = 0.0;
  for (int i : heldout) {
    sum += (data.Y().row(i) - data.X().row(i) * fit.B_hat.B).norm();
  }
  return sum;
}

}  // namespace

std::vector<int> CvPlan::make_assignment(Index n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<Index>(k) > n) {
    throw BadSpec("fold count must satisfy 2 <= k <= n");
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    perm[i] = static_cast<int>(i);
  }
  Rng rng(seed);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  std::vector<int> assignment(perm.size());
  for (int f = 0; f < k; ++f) {
    const auto lo = static_cast<std::size_t>(static_cast<Index>(f) * n / k);
    const auto hi = static_cast<std::size_t>(static_cast<Index>(f + 1) * n / k);
    for (std::size_t pos = lo; pos < hi; ++pos) {
      assignment[static_cast<std::size_t>(perm[pos])] = f;
    }
  }
  return assignment;
}

CvPlan CvPlan::make(Index n, int k, std::uint64_t seed,
                    std::vector<double> lambda1_grid,
                    std::vector<double> lambda2_grid) {
  CvPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_assignment = make_assignment(n, k, seed);
  plan.lambda1_grid = sorted_grid(std::move(lambda1_grid), "lambda1");
  plan.lambda2_grid = sorted_grid(std::move(lambda2_grid), "lambda2");
  return plan;
}

double cv_error(const Dataset& data, const PenaltySpec& pen, const CvPlan& plan,
                const SolverConfig& cfg) {
  if (static_cast<Index>(plan.fold_assignment.size()) != data.n()) {
    throw DimensionMismatch("fold assignment length differs from n");
  }
  double total = 0.0;
  for (int f = 0; f < plan.k; ++f) {
    const auto [train_idx, heldout_idx] = split_rows(plan.fold_assignment, f);
    const Dataset train = data.rows(train_idx);
    total += fold_heldout_sum(data, train, heldout_idx, pen, cfg, nullptr, nullptr);
  }
  return total / static_cast<double>(data.n());
}

CvSurface grid_search(const Dataset& data, const std::vector<int>& gamma,
                      const std::vector<int>& delta, const CvPlan& plan,
                      const SolverConfig& cfg, unsigned threads) {
  if (static_cast<Index>(plan.fold_assignment.size()) != data.n()) {
    throw DimensionMismatch("fold assignment length differs from n");
  }
  const Index n1 = static_cast<Index>(plan.lambda1_grid.size());
  const Index n2 = static_cast<Index>(plan.lambda2_grid.size());
  const int k = plan.k;

  CvSurface surf;
  surf.lambda1_grid = plan.lambda1_grid;
  surf.lambda2_grid = plan.lambda2_grid;

  // held-out sums per (fold, lambda1, lambda2); tasks fill disjoint slices
  std::vector<Matrix> sums(static_cast<std::size_t>(k),
                           Matrix::Constant(n1, n2, std::nan("")));
  std::vector<std::string> failure_slots(
      static_cast<std::size_t>(k * n1 * n2));

  struct Task {
    Index i1;
    int fold;
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(n1) * static_cast<std::size_t>(k));
  for (Index i1 = 0; i1 < n1; ++i1) {
    for (int f = 0; f < k; ++f) {
      tasks.push_back({i1, f});
    }
  }

  auto run_task = [&](const Task& task) {
    const auto [train_idx, heldout_idx] = split_rows(plan.fold_assignment, task.fold);
    const Dataset train = data.rows(train_idx);
    Matrix warm;
    bool have_warm = false;
    for (Index i2 = 0; i2 < n2; ++i2) {
      const PenaltySpec pen(gamma, delta, plan.lambda1_grid[static_cast<std::size_t>(task.i1)],
                            plan.lambda2_grid[static_cast<std::size_t>(i2)]);
      try {
        Matrix B_fit;
        const double sum = fold_heldout_sum(data, train, heldout_idx, pen, cfg,
                                            have_warm ? &warm : nullptr, &B_fit);
        sums[static_cast<std::size_t>(task.fold)](task.i1, i2) = sum;
        warm = std::move(B_fit);
        have_warm = true;
      } catch (const Error& e) {
        const auto slot = static_cast<std::size_t>(
            (static_cast<Index>(task.fold) * n1 + task.i1) * n2 + i2);
        failure_slots[slot] = e.what();
        have_warm = false;
      }
    }
  };

  unsigned nthreads = threads != 0 ? threads : std::thread::hardware_concurrency();
  nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(tasks.size())));
  if (nthreads <= 1) {
    for (const Task& t : tasks) {
      run_task(t);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
        run_task(tasks[t]);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  // deterministic aggregation keyed by grid index
  surf.errors = Matrix::Constant(n1, n2, std::nan(""));
  surf.per_fold.assign(static_cast<std::size_t>(k), Matrix::Constant(n1, n2, std::nan("")));
  std::vector<Index> fold_sizes(static_cast<std::size_t>(k), 0);
  for (int a : plan.fold_assignment) {
    ++fold_sizes[static_cast<std::size_t>(a)];
  }
  for (Index i1 = 0; i1 < n1; ++i1) {
    for (Index i2 = 0; i2 < n2; ++i2) {
      double total = 0.0;
      bool ok = true;
      for (int f = 0; f < k; ++f) {
        const double s = sums[static_cast<std::size_t>(f)](i1, i2);
        if (std::isnan(s)) {
          ok = false;
          const auto slot = static_cast<std::size_t>(
              (static_cast<Index>(f) * n1 + i1) * n2 + i2);
          if (!failure_slots[slot].empty()) {
            surf.failures.push_back(
                "lambda1=" + std::to_string(plan.lambda1_grid[static_cast<std::size_t>(i1)]) +
                " lambda2=" + std::to_string(plan.lambda2_grid[static_cast<std::size_t>(i2)]) +
                " fold=" + std::to_string(f) + ": " + failure_slots[slot]);
          }
          continue;
        }
        surf.per_fold[static_cast<std::size_t>(f)](i1, i2) =
            s / static_cast<double>(fold_sizes[static_cast<std::size_t>(f)]);
        total += s;
      }
      if (ok) {
        surf.errors(i1, i2) = total / static_cast<double>(data.n());
      }
    }
  }

  // argmin over evaluated points; ties go to the larger (lambda1, lambda2)
  for (Index i1 = 0; i1 < n1; ++i1) {
    for (Index i2 = 0; i2 < n2; ++i2) {
      const double e = surf.errors(i1, i2);
      if (std::isnan(e)) {
        continue;
      }
      // ascending scan: <= lets the lexicographically larger tie win
      if (surf.best_i < 0 || e <= surf.best_error) {
        surf.best_i = i1;
        surf.best_j = i2;
        surf.best_error = e;
      }
    }
  }
  if (surf.best_i >= 0) {
    surf.best_lambda1 = surf.lambda1_grid[static_cast<std::size_t>(surf.best_i)];
    surf.best_lambda2 = surf.lambda2_grid[static_cast<std::size_t>(surf.best_j)];
  }
  return surf;
}

}  // namespace flad
