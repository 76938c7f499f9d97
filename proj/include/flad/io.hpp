#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flad/model.hpp"

namespace flad {

/// Which columns of the input table are outcomes: either the first `count`
/// columns or an explicit list of 1-based column indices.
struct OutcomeSpec {
  int count = 0;
  std::vector<int> columns;  // 1-based; used when nonempty

  static OutcomeSpec first(int k) { return OutcomeSpec{k, {}}; }
  static OutcomeSpec list(std::vector<int> cols) { return OutcomeSpec{0, std::move(cols)}; }
};

/// Parse a delimiter-separated numeric table (comma or tab, auto-detected
/// from the first line), split columns into Y and covariates per `outcomes`,
/// prepend the intercept column and validate.
Dataset ingest(const std::filesystem::path& path, bool has_header,
               const OutcomeSpec& outcomes);

/// Whether the first line of the file looks like a header (any cell that
/// does not parse as a number).
bool detect_header(const std::filesystem::path& path);

/// Entrywise x -> ln(x + sqrt(x^2+1)) on the selected covariate columns
/// (1-based, intercept excluded) and optionally on every outcome column.
Dataset asinh_transform(const Dataset& data, const std::vector<int>& x_cols,
                        bool transform_y = false);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Write a matrix as CSV with the given column names (empty = no header).
/// Writes to a temporary file and renames into place.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& M,
                      const std::vector<std::string>& header);

/// Atomic small-text writer used for summaries and manifests.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace flad
