#include "errdens/csv.hpp"

#include "errdens/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace errdens {

std::string format_double(double value)
{
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

std::string trim_ws(const std::string& s)
{
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos)
    return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ','))
    cells.push_back(trim_ws(cell));
  if (!line.empty() && line.back() == ',')
    cells.push_back("");
  return cells;
}

[[noreturn]] void malformed(const std::string& path, std::size_t row, std::size_t col,
                            const std::string& why)
{
  std::ostringstream os;
  os << path << ": " << why << " at row " << row << ", column " << col;
  throw_error(ErrorCode::MalformedCsv, os.str());
}

double parse_cell(const std::string& path, const std::string& cell, std::size_t row,
                  std::size_t col)
{
  if (cell.empty())
    malformed(path, row, col, "empty cell");
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &consumed);
  } catch (const std::exception&) {
    malformed(path, row, col, "non-numeric cell '" + cell + "'");
  }
  if (consumed != cell.size())
    malformed(path, row, col, "non-numeric cell '" + cell + "'");
  if (!std::isfinite(value))
    malformed(path, row, col, "non-finite value");
  return value;
}

} // namespace

Sample load_sample(const std::string& path)
{
  std::ifstream file(path);
  require(file.good(), ErrorCode::Io, "cannot open " + path);

  std::string line;
  std::size_t row = 0;
  Sample sample;
  bool have_header = false;

  while (std::getline(file, line)) {
    ++row;
    if (trim_ws(line).empty()) {
      if (!have_header)
        malformed(path, row, 1, "blank header line");
      continue;
    }
    const auto cells = split_csv_line(line);
    if (!have_header) {
      // header must be x1..xd,y
      if (cells.size() < 2 || cells.back() != "y")
        malformed(path, row, cells.size(), "header must be x1,...,xd,y");
      for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
        if (cells[j] != "x" + std::to_string(j + 1))
          malformed(path, row, j + 1, "header must be x1,...,xd,y");
      }
      sample.d = static_cast<int>(cells.size()) - 1;
      have_header = true;
      continue;
    }
    if (cells.size() != static_cast<std::size_t>(sample.d) + 1)
      malformed(path, row, cells.size(), "ragged row");
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double value = parse_cell(path, cells[j], row, j + 1);
      if (j + 1 < cells.size())
        sample.x.push_back(value);
      else
        sample.y.push_back(value);
    }
    ++sample.n;
  }

  require(row > 0, ErrorCode::EmptyFile, path + " is empty");
  require(sample.n >= 1, ErrorCode::InvalidArgument, path + ": no data rows");
  sample.validate();
  return sample;
}

void write_sample(const std::string& path, const Sample& sample)
{
  sample.validate();
  std::ofstream file(path);
  require(file.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  for (int j = 0; j < sample.d; ++j)
    file << "x" << j + 1 << ",";
  file << "y\n";
  for (int i = 0; i < sample.n; ++i) {
    for (int j = 0; j < sample.d; ++j)
      file << format_double(sample.x[static_cast<std::size_t>(i) * sample.d + j]) << ",";
    file << format_double(sample.y[i]) << "\n";
  }
  require(file.good(), ErrorCode::Io, "write failed for " + path);
}

} // namespace errdens
