#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flad/io.hpp"
#include "flad/model.hpp"
#include "flad/simulate.hpp"
#include "flad/solver.hpp"

namespace flad {

/// Grid definition in start:stop:count form, linearly or log spaced.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool log = false;

  bool given() const { return count > 0; }
  std::vector<double> values() const;

  /// Parse "start:stop:count,lin" / "start:stop:count,log".
  static GridSpec parse(const std::string& text);
};

struct RunConfig {
  enum class Command { fit, cv, path, simulate };

  Command command = Command::fit;
  std::filesystem::path input;
  std::filesystem::path out_dir;
  OutcomeSpec outcomes;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::optional<std::vector<int>> gamma_list;  // 1-based; nullopt = all
  std::optional<std::vector<int>> delta_list;  // 1-based; nullopt = all
  GridSpec grid1;
  GridSpec grid2;
  int folds = 5;
  std::uint64_t seed = 0;
  std::vector<int> asinh_cols;
  bool asinh_all = false;
  bool asinh_y = false;
  SolverConfig solver;
  unsigned threads = 0;
};

/// Execute the command and write its output files into out_dir.
/// Returns the process exit code: 0 success, 4 solver non-convergence
/// (outputs still written and flagged). Throws ConfigError for inconsistent
/// configuration and data/solver errors otherwise; any partial outputs are
/// removed before an exception leaves.
int run(const RunConfig& config);

/// Exit code for an error escaping run(): 2 for configuration, 3 for data.
int exit_code_for(const Error& e);

}  // namespace flad
