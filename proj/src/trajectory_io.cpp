#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "deltaf/csv.hpp"
#include "deltaf/trajectory.hpp"

namespace deltaf::traj {

namespace {

constexpr std::string_view kMagic = "deltaf_trajectory";

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::vector<double> expect_row(std::istream& in, std::size_t width, const char* what) {
  std::string line;
  if (!next_line(in, line)) {
    throw Error(ErrorCode::kParse, std::string("trajectory file truncated while reading ") + what);
  }
  auto row = csv::parse_row(line);
  if (row.size() != width) {
    throw Error(ErrorCode::kParse, std::string(what) + " row needs " + std::to_string(width) + " values, got " +
                                       std::to_string(row.size()));
  }
  return row;
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& t) {
  t.validate();
  out << kMagic << ',' << t.rel_poses.size() << '\n';
  for (const auto& c : t.edge_covs) {
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (j) out << ',';
        out << csv::format_double(c(i, j));
      }
      out << '\n';
    }
  }
  auto write_pose = [&](const se3::Pose& p) {
    const auto row = p.to_row();
    out << csv::join_row(std::vector<double>(row.begin(), row.end())) << '\n';
  };
  write_pose(t.head);
  for (const auto& p : t.rel_poses) write_pose(p);
}

Trajectory read_trajectory(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw Error(ErrorCode::kParse, "empty trajectory file");
  const auto comma = line.find(',');
  if (comma == std::string::npos || std::string_view(line).substr(0, comma) != kMagic) {
    throw Error(ErrorCode::kParse, "missing trajectory header");
  }
  const double n_value = csv::parse_double(std::string_view(line).substr(comma + 1));
  if (n_value < 1 || n_value != static_cast<double>(static_cast<long>(n_value))) {
    throw Error(ErrorCode::kParse, "relative pose count must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(n_value);

  Trajectory t;
  t.edge_covs.resize(n + 1);
  for (auto& c : t.edge_covs) {
    for (int i = 0; i < 6; ++i) {
      const auto row = expect_row(in, 6, "covariance");
      for (int j = 0; j < 6; ++j) c(i, j) = row[j];
    }
  }
  auto read_pose = [&] {
    const auto row = expect_row(in, 12, "pose");
    std::array<double, 12> a{};
    std::copy(row.begin(), row.end(), a.begin());
    return se3::Pose::from_row(a);
  };
  t.head = read_pose();
  t.rel_poses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.rel_poses.push_back(read_pose());
  if (next_line(in, line)) throw Error(ErrorCode::kParse, "trailing data after the last pose");
  t.validate();
  return t;
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& t) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_trajectory(out, t);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_trajectory(in);
}

}  // namespace deltaf::traj
