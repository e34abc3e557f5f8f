#include "deltaf/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace deltaf::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 40> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc{}) {
    throw Error(ErrorCode::kInvalidArgument, "cannot format value");
  }
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw Error(ErrorCode::kParse, "not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) throw Error(ErrorCode::kParse, "non-finite value: '" + std::string(field) + "'");
  return value;
}

std::vector<double> parse_row(std::string_view line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(parse_double(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_row(const std::vector<double>& values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_double(values[i]);
  }
  return line;
}

void write_matrix(std::ostream& out, const Eigen::Ref<const DenseMatrix>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(parse_row(line));
    if (rows.back().size() != rows.front().size()) {
      throw Error(ErrorCode::kParse, "ragged matrix CSV at row " + std::to_string(rows.size()));
    }
  }
  if (rows.empty()) return DenseMatrix(0, 0);
  DenseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  require_finite(m, "CSV matrix");
  return m;
}

void write_vector(std::ostream& out, const Eigen::Ref<const DenseVector>& v) {
  write_matrix(out, v.transpose());
}

DenseVector read_vector(std::istream& in) {
  DenseMatrix m = read_matrix(in);
  if (m.rows() > 1) {
    throw Error(ErrorCode::kParse, "vector CSV must be a single row");
  }
  return m.rows() == 0 ? DenseVector(0) : DenseVector(m.row(0).transpose());
}

void save_matrix(const std::filesystem::path& path, const Eigen::Ref<const DenseMatrix>& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_matrix(out, m);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace deltaf::csv
