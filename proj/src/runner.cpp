#include "flad/runner.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "flad/tuning.hpp"

namespace flad {

std::vector<double> GridSpec::values() const {
  if (count < 1) {
    throw ConfigError("grid count must be >= 1");
  }
  if (log && (start <= 0.0 || stop <= 0.0)) {
    throw ConfigError("log grid endpoints must be positive");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    if (log) {
      out.push_back(std::exp(std::log(start) + t * (std::log(stop) - std::log(start))));
    } else {
      out.push_back(start + t * (stop - start));
    }
  }
  return out;
}

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec spec;
  const auto comma = text.rfind(',');
  std::string range = text;
  if (comma != std::string::npos) {
    const std::string mode = text.substr(comma + 1);
    if (mode == "log") {
      spec.log = true;
    } else if (mode != "lin") {
      throw ConfigError("grid mode must be lin or log, got '" + mode + "'");
    }
    range = text.substr(0, comma);
  }
  std::istringstream in(range);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    throw ConfigError("grid must be start:stop:count[,lin|log], got '" + text + "'");
  }
  try {
    spec.start = std::stod(a);
    spec.stop = std::stod(b);
    spec.count = std::stoi(c);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse grid '" + text + "'");
  }
  if (spec.count < 1) {
    throw ConfigError("grid count must be >= 1");
  }
  return spec;
}

namespace {

// removes this run's outputs if it does not finish
class OutputTracker {
 public:
  ~OutputTracker() {
    if (!committed_) {
      for (const auto& f : files_) {
        std::error_code ec;
        std::filesystem::remove(f, ec);
      }
    }
  }

  void add(std::filesystem::path f) { files_.push_back(std::move(f)); }
  void commit() { committed_ = true; }

 private:
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

std::vector<int> indicator_from_list(const std::optional<std::vector<int>>& list,
                                     Index len, const char* name) {
  if (!list.has_value()) {
    return std::vector<int>(static_cast<std::size_t>(len), 1);
  }
  std::vector<int> out(static_cast<std::size_t>(len), 0);
  for (int idx : *list) {
    if (idx < 1 || static_cast<Index>(idx) > len) {
      throw ConfigError(std::string(name) + " index " + std::to_string(idx) +
                        " outside 1.." + std::to_string(len));
    }
    out[static_cast<std::size_t>(idx - 1)] = 1;
  }
  return out;
}

Dataset load_input(const RunConfig& config) {
  if (config.input.empty()) {
    throw ConfigError("--input is required");
  }
  if (!std::filesystem::exists(config.input)) {
    throw ConfigError("input file " + config.input.string() + " does not exist");
  }
  if (config.outcomes.count == 0 && config.outcomes.columns.empty()) {
    throw ConfigError("--outcomes is required");
  }
  Dataset data = ingest(config.input, detect_header(config.input), config.outcomes);
  if (config.asinh_all || !config.asinh_cols.empty()) {
    std::vector<int> cols = config.asinh_cols;
    if (config.asinh_all) {
      cols.resize(static_cast<std::size_t>(data.p()));
      for (Index j = 0; j < data.p(); ++j) {
        cols[static_cast<std::size_t>(j)] = static_cast<int>(j) + 1;
      }
    }
    data = asinh_transform(data, cols, config.asinh_y);
  }
  return data;
}

PenaltySpec penalty_for(const RunConfig& config, const Dataset& data,
                        double lambda1, double lambda2) {
  return PenaltySpec(indicator_from_list(config.gamma_list, data.p(), "gamma"),
                     indicator_from_list(config.delta_list,
                                         std::max<Index>(data.p() - 1, 0), "delta"),
                     lambda1, lambda2);
}

void write_coefficients(const std::filesystem::path& path, const FitResult& fit,
                        OutputTracker& tracker) {
  std::ostringstream out;
  out << "covariate";
  for (Index l = 1; l <= fit.B_hat.q(); ++l) {
    out << ",b" << l;
  }
  out << ",active,group\n";
  std::vector<int> group_of(static_cast<std::size_t>(fit.B_hat.p()) + 1, 0);
  for (std::size_t g = 0; g < fit.fused_groups.size(); ++g) {
    for (int j = fit.fused_groups[g].first; j <= fit.fused_groups[g].last; ++j) {
      group_of[static_cast<std::size_t>(j)] = static_cast<int>(g) + 1;
    }
  }
  for (Index j = 0; j <= fit.B_hat.p(); ++j) {
    out << j;
    for (Index l = 0; l < fit.B_hat.q(); ++l) {
      out << ',' << format_double(fit.B_hat.B(j, l));
    }
    const bool active =
        j == 0 || std::find(fit.active_rows.begin(), fit.active_rows.end(),
                            static_cast<int>(j)) != fit.active_rows.end();
    out << ',' << (active ? 1 : 0) << ',' << group_of[static_cast<std::size_t>(j)]
        << '\n';
  }
  write_text(path, out.str());
  tracker.add(path);
}

void write_summary(const std::filesystem::path& path, const FitResult& fit,
                   OutputTracker& tracker) {
  std::ostringstream out;
  out << "objective " << format_double(fit.objective) << '\n'
      << "iterations " << fit.iterations << '\n'
      << "converged " << (fit.converged ? "true" : "false") << '\n';
  write_text(path, out.str());
  tracker.add(path);
}

int run_fit(const RunConfig& config, OutputTracker& tracker) {
  const Dataset data = load_input(config);
  const PenaltySpec pen = penalty_for(config, data, config.lambda1, config.lambda2);
  const FitResult fit = fit_fused_lad_lasso(data, pen, config.solver);
  write_coefficients(config.out_dir / "coefficients.csv", fit, tracker);
  write_summary(config.out_dir / "summary.txt", fit, tracker);
  tracker.commit();
  return fit.converged ? 0 : 4;
}

int run_cv(const RunConfig& config, OutputTracker& tracker) {
  if (!config.grid1.given() || !config.grid2.given()) {
    throw ConfigError("cv requires --grid1 and --grid2");
  }
  const Dataset data = load_input(config);
  const CvPlan plan = CvPlan::make(data.n(), config.folds, config.seed,
                                   config.grid1.values(), config.grid2.values());
  const std::vector<int> gamma =
      indicator_from_list(config.gamma_list, data.p(), "gamma");
  const std::vector<int> delta = indicator_from_list(
      config.delta_list, std::max<Index>(data.p() - 1, 0), "delta");
  const CvSurface surf =
      grid_search(data, gamma, delta, plan, config.solver, config.threads);

  std::ostringstream out;
  out << "lambda1,lambda2,cv_error\n";
  for (Index i = 0; i < surf.errors.rows(); ++i) {
    for (Index j = 0; j < surf.errors.cols(); ++j) {
      out << format_double(surf.lambda1_grid[static_cast<std::size_t>(i)]) << ','
          << format_double(surf.lambda2_grid[static_cast<std::size_t>(j)]) << ','
          << format_double(surf.errors(i, j)) << '\n';
    }
  }
  write_text(config.out_dir / "cv_surface.csv", out.str());
  tracker.add(config.out_dir / "cv_surface.csv");

  std::ostringstream best;
  best << "lambda1 " << format_double(surf.best_lambda1) << '\n'
       << "lambda2 " << format_double(surf.best_lambda2) << '\n'
       << "cv_error " << format_double(surf.best_error) << '\n';
  write_text(config.out_dir / "best.txt", best.str());
  tracker.add(config.out_dir / "best.txt");
  tracker.commit();
  return surf.failures.empty() ? 0 : 4;
}

int run_path(const RunConfig& config, OutputTracker& tracker) {
  if (config.grid1.given() == config.grid2.given()) {
    throw ConfigError("path requires exactly one of --grid1 (lambda1 sweep) "
                      "or --grid2 (lambda2 sweep)");
  }
  const Dataset data = load_input(config);
  const bool sweep1 = config.grid1.given();
  std::vector<double> grid = (sweep1 ? config.grid1 : config.grid2).values();
  std::sort(grid.begin(), grid.end());

  std::ostringstream out;
  out << "lambda,covariate,outcome,value\n";
  Matrix warm;
  bool have_warm = false;
  bool all_converged = true;
  for (double lambda : grid) {
    const PenaltySpec pen = penalty_for(config, data,
                                        sweep1 ? lambda : config.lambda1,
                                        sweep1 ? config.lambda2 : lambda);
    const FitResult fit = fit_fused_lad_lasso(data, pen, config.solver,
                                              have_warm ? &warm : nullptr);
    all_converged = all_converged && fit.converged;
    warm = fit.B_hat.B;
    have_warm = true;
    for (Index j = 0; j <= fit.B_hat.p(); ++j) {
      for (Index l = 0; l < fit.B_hat.q(); ++l) {
        out << format_double(lambda) << ',' << j << ',' << (l + 1) << ','
            << format_double(fit.B_hat.B(j, l)) << '\n';
      }
    }
  }
  write_text(config.out_dir / "path.csv", out.str());
  tracker.add(config.out_dir / "path.csv");
  tracker.commit();
  return all_converged ? 0 : 4;
}

int run_simulate(const RunConfig& config, OutputTracker& tracker) {
  const SimSpec spec = SimSpec::defaults(config.seed);
  const SimData sim = generate(spec);
  const Index p = sim.data.p();
  const Index q = sim.data.q();

  std::vector<std::string> yh, xh, bh, dh;
  for (Index l = 1; l <= q; ++l) {
    yh.push_back("y" + std::to_string(l));
    bh.push_back("b" + std::to_string(l));
  }
  for (Index j = 1; j <= p; ++j) {
    xh.push_back("x" + std::to_string(j));
  }
  dh = yh;
  dh.insert(dh.end(), xh.begin(), xh.end());

  write_matrix_csv(config.out_dir / "Y.csv", sim.data.Y(), yh);
  tracker.add(config.out_dir / "Y.csv");
  write_matrix_csv(config.out_dir / "X.csv", sim.data.X().rightCols(p), xh);
  tracker.add(config.out_dir / "X.csv");
  write_matrix_csv(config.out_dir / "B_true.csv", sim.B_true.B, bh);
  tracker.add(config.out_dir / "B_true.csv");

  Matrix table(sim.data.n(), q + p);
  table.leftCols(q) = sim.data.Y();
  table.rightCols(p) = sim.data.X().rightCols(p);
  write_matrix_csv(config.out_dir / "data.csv", table, dh);
  tracker.add(config.out_dir / "data.csv");

  nlohmann::json manifest;
  manifest["command"] = "simulate";
  manifest["seed"] = config.seed;
  manifest["n"] = spec.n;
  manifest["p"] = spec.p;
  manifest["q"] = spec.q;
  write_text(config.out_dir / "manifest.json", manifest.dump(2) + "\n");
  tracker.add(config.out_dir / "manifest.json");
  tracker.commit();
  return 0;
}

}  // namespace

int run(const RunConfig& config) {
  if (config.out_dir.empty()) {
    throw ConfigError("--out is required");
  }
  std::filesystem::create_directories(config.out_dir);
  OutputTracker tracker;
  switch (config.command) {
    case RunConfig::Command::fit:
      return run_fit(config, tracker);
    case RunConfig::Command::cv:
      return run_cv(config, tracker);
    case RunConfig::Command::path:
      return run_path(config, tracker);
    case RunConfig::Command::simulate:
      return run_simulate(config, tracker);
  }
  throw ConfigError("unknown command");
}

int exit_code_for(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) != nullptr ? 2 : 3;
}

}  // namespace flad
