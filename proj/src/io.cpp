#include "flad/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flad {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \r");
  return s.substr(begin, end - begin + 1);
}

bool parse_cell(const std::string& raw, double& out) {
  const std::string cell = trim(raw);
  if (cell.empty()) {
    return false;
  }
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

char detect_delimiter(const std::string& first_line) {
  return first_line.find('\t') != std::string::npos ? '\t' : ',';
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw EmptyFile("cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      lines.push_back(line);
    }
  }
  if (lines.empty()) {
    throw EmptyFile(path.string() + " has no data rows");
  }
  return lines;
}

}  // namespace

bool detect_header(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const char delim = detect_delimiter(lines.front());
  double value;
  for (const auto& cell : split_line(lines.front(), delim)) {
    if (!parse_cell(cell, value)) {
      return true;
    }
  }
  return false;
}

Dataset ingest(const std::filesystem::path& path, bool has_header,
               const OutcomeSpec& outcomes) {
  const auto lines = read_lines(path);
  const char delim = detect_delimiter(lines.front());
  const std::size_t first_data = has_header ? 1 : 0;
  if (first_data >= lines.size()) {
    throw EmptyFile(path.string() + " has a header but no data rows");
  }

  const std::size_t ncols = split_line(lines[first_data], delim).size();
  const std::size_t nrows = lines.size() - first_data;
  Matrix table(static_cast<Index>(nrows), static_cast<Index>(ncols));
  for (std::size_t r = 0; r < nrows; ++r) {
    const auto cells = split_line(lines[first_data + r], delim);
    if (cells.size() != ncols) {
      throw ParseError(first_data + r + 1, cells.size(),
                       "expected " + std::to_string(ncols) + " cells, found " +
                           std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      double value;
      if (!parse_cell(cells[c], value)) {
        throw NonNumericCell(first_data + r + 1, c + 1, trim(cells[c]));
      }
      table(static_cast<Index>(r), static_cast<Index>(c)) = value;
    }
  }

  std::vector<int> ycols;
  if (!outcomes.columns.empty()) {
    for (int c : outcomes.columns) {
      if (c < 1 || static_cast<std::size_t>(c) > ncols) {
        throw ConfigError("outcome column " + std::to_string(c) + " out of range");
      }
      ycols.push_back(c - 1);
    }
  } else {
    if (outcomes.count < 1 || static_cast<std::size_t>(outcomes.count) >= ncols) {
      throw ConfigError("outcome count must be in 1.." + std::to_string(ncols - 1));
    }
    for (int c = 0; c < outcomes.count; ++c) {
      ycols.push_back(c);
    }
  }

  std::vector<int> xcols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (std::find(ycols.begin(), ycols.end(), static_cast<int>(c)) == ycols.end()) {
      xcols.push_back(static_cast<int>(c));
    }
  }
  if (xcols.empty()) {
    throw ConfigError("no covariate columns remain");
  }

  Matrix Y(table.rows(), static_cast<Index>(ycols.size()));
  for (std::size_t c = 0; c < ycols.size(); ++c) {
    Y.col(static_cast<Index>(c)) = table.col(ycols[c]);
  }
  Matrix X(table.rows(), static_cast<Index>(xcols.size()) + 1);
  X.col(0).setOnes();
  for (std::size_t c = 0; c < xcols.size(); ++c) {
    X.col(static_cast<Index>(c) + 1) = table.col(xcols[c]);
  }
  return Dataset::validate(std::move(Y), std::move(X), true);
}

Dataset asinh_transform(const Dataset& data, const std::vector<int>& x_cols,
                        bool transform_y) {
  Matrix X = data.X();
  for (int j : x_cols) {
    if (j < 1 || static_cast<Index>(j) > data.p()) {
      throw ConfigError("asinh column " + std::to_string(j) +
                        " outside 1.." + std::to_string(data.p()));
    }
    X.col(j) = X.col(j).array().unaryExpr([](double v) { return std::asinh(v); });
  }
  Matrix Y = data.Y();
  if (transform_y) {
    Y = Y.array().unaryExpr([](double v) { return std::asinh(v); });
  }
  return Dataset::validate(std::move(Y), std::move(X), true);
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

void rename_into_place(const std::filesystem::path& tmp,
                       const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot write " + path.string() + ": " + ec.message());
  }
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& M,
                      const std::vector<std::string>& header) {
  const auto tmp = path.parent_path() / (".tmp-" + path.filename().string());
  {
    std::ofstream out(tmp);
    if (!out) {
      throw Error("cannot open " + tmp.string() + " for writing");
    }
    if (!header.empty()) {
      for (std::size_t c = 0; c < header.size(); ++c) {
        out << (c > 0 ? "," : "") << header[c];
      }
      out << '\n';
    }
    for (Index r = 0; r < M.rows(); ++r) {
      for (Index c = 0; c < M.cols(); ++c) {
        out << (c > 0 ? "," : "") << format_double(M(r, c));
      }
      out << '\n';
    }
  }
  rename_into_place(tmp, path);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.parent_path() / (".tmp-" + path.filename().string());
  {
    std::ofstream out(tmp);
    if (!out) {
      throw Error("cannot open " + tmp.string() + " for writing");
    }
    out << content;
  }
  rename_into_place(tmp, path);
}

}  // namespace flad
