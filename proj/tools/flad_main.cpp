#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "flad/runner.hpp"

namespace {

std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string tok =
        text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw flad::ConfigError("cannot parse index '" + tok + "'");
    }
    if (pos == std::string::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

void add_common_flags(CLI::App* cmd, flad::RunConfig& config, std::string& outcomes,
                      std::string& gamma, std::string& delta, std::string& asinh_cols) {
  cmd->add_option("--input", config.input, "input table (CSV or TSV)");
  cmd->add_option("--outcomes", outcomes,
                  "outcome columns: a count k (first k columns) or a 1-based list");
  cmd->add_option("--lambda1", config.lambda1, "group penalty tuning value");
  cmd->add_option("--lambda2", config.lambda2, "fusion penalty tuning value");
  cmd->add_option("--gamma", gamma, "penalized covariates: 'all' or 1-based list");
  cmd->add_option("--delta", delta, "penalized differences: 'all' or 1-based list");
  cmd->add_option("--asinh", asinh_cols,
                  "covariate columns to asinh-transform: 'all' or 1-based list");
  cmd->add_flag("--asinh-y", config.asinh_y, "also asinh-transform the outcomes");
  cmd->add_option("--max-iter", config.solver.max_iter, "solver iteration cap");
  cmd->add_option("--tol", config.solver.tol_rel, "relative objective decrease tolerance");
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--threads", config.threads, "worker threads for cv (0 = auto)");
  cmd->add_option("--out", config.out_dir, "output directory")->required();
}

void finish_config(flad::RunConfig& config, const std::string& outcomes,
                   const std::string& gamma, const std::string& delta,
                   const std::string& asinh_cols) {
  if (!outcomes.empty()) {
    if (outcomes.find(',') != std::string::npos) {
      config.outcomes = flad::OutcomeSpec::list(parse_index_list(outcomes));
    } else {
      try {
        config.outcomes = flad::OutcomeSpec::first(std::stoi(outcomes));
      } catch (const std::exception&) {
        throw flad::ConfigError("cannot parse --outcomes '" + outcomes + "'");
      }
    }
  }
  if (!gamma.empty() && gamma != "all") {
    config.gamma_list = parse_index_list(gamma);
  }
  if (!delta.empty() && delta != "all") {
    config.delta_list = parse_index_list(delta);
  }
  if (asinh_cols == "all") {
    config.asinh_all = true;
  } else if (!asinh_cols.empty()) {
    config.asinh_cols = parse_index_list(asinh_cols);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-outcome fused LAD-lasso regression"};
  app.require_subcommand(1);

  flad::RunConfig config;
  std::string outcomes, gamma, delta, asinh_cols;
  std::string grid1_text, grid2_text;

  CLI::App* fit = app.add_subcommand("fit", "fit one model at fixed tuning values");
  add_common_flags(fit, config, outcomes, gamma, delta, asinh_cols);

  CLI::App* cv = app.add_subcommand("cv", "cross-validated grid search");
  add_common_flags(cv, config, outcomes, gamma, delta, asinh_cols);
  cv->add_option("--grid1", grid1_text, "lambda1 grid start:stop:count[,lin|log]");
  cv->add_option("--grid2", grid2_text, "lambda2 grid start:stop:count[,lin|log]");
  cv->add_option("--folds", config.folds, "number of folds");

  CLI::App* path = app.add_subcommand("path", "coefficient trajectories over a sweep");
  add_common_flags(path, config, outcomes, gamma, delta, asinh_cols);
  path->add_option("--grid1", grid1_text, "sweep lambda1 over start:stop:count[,lin|log]");
  path->add_option("--grid2", grid2_text, "sweep lambda2 over start:stop:count[,lin|log]");

  CLI::App* simulate = app.add_subcommand("simulate", "write a synthetic dataset");
  simulate->add_option("--seed", config.seed, "random seed");
  simulate->add_option("--out", config.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    finish_config(config, outcomes, gamma, delta, asinh_cols);
    if (!grid1_text.empty()) {
      config.grid1 = flad::GridSpec::parse(grid1_text);
    }
    if (!grid2_text.empty()) {
      config.grid2 = flad::GridSpec::parse(grid2_text);
    }
    if (fit->parsed()) {
      config.command = flad::RunConfig::Command::fit;
    } else if (cv->parsed()) {
      config.command = flad::RunConfig::Command::cv;
    } else if (path->parsed()) {
      config.command = flad::RunConfig::Command::path;
    } else {
      config.command = flad::RunConfig::Command::simulate;
    }
    return flad::run(config);
  } catch (const flad::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return flad::exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
