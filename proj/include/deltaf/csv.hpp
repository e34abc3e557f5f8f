#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "deltaf/linalg.hpp"

namespace deltaf::csv {

/// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double value);

/// Locale-independent parse of a full field; throws kParse on trailing junk
/// and on NaN or Inf.
double parse_double(std::string_view field);

/// Splits one line on ',' and parses every field.
std::vector<double> parse_row(std::string_view line);

std::string join_row(const std::vector<double>& values);

/// One matrix row per line, no header.
void write_matrix(std::ostream& out, const Eigen::Ref<const DenseMatrix>& m);
DenseMatrix read_matrix(std::istream& in);

/// A vector is written as a single row.
void write_vector(std::ostream& out, const Eigen::Ref<const DenseVector>& v);
DenseVector read_vector(std::istream& in);

void save_matrix(const std::filesystem::path& path, const Eigen::Ref<const DenseMatrix>& m);
DenseMatrix load_matrix(const std::filesystem::path& path);

}  // namespace deltaf::csv
