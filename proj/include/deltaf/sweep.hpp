#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "deltaf/trajectory.hpp"

namespace deltaf::bench {

enum class Mode { kPredict, kSolve, kBoth };

Mode parse_mode(std::string_view text);
std::string_view to_string(Mode mode);

struct SweepOptions {
  Mode mode = Mode::kBoth;
  int jobs = 0;  // 0: one worker per hardware thread
  /// When false the timing columns are written as zero, which makes the
  /// grid CSV byte-identical across runs.
  bool record_timings = true;
  nl::SolverOptions solver;
};

/// One alignment pair. Values that were not computed are NaN; a failed
/// computation leaves its error code name in `status`.
struct SweepRow {
  int l = 0;
  int r = 0;
  double delta_f;
  double f_real;
  double rel_error;
  double t_predict = 0.0;
  double t_solve = 0.0;
  std::string status = "ok";
};

struct SweepSummary {
  std::size_t rows = 0;
  std::size_t failures = 0;
  double max_rel_error;
  double median_rel_error;
  double p99_rel_error;
  double total_predict = 0.0;  // s
  double total_solve = 0.0;    // s
};

struct SweepResult {
  std::vector<SweepRow> rows;  // l-major, r-minor
  SweepSummary summary;
};

/// Every (l, r) in 1..N_A+1 x 1..N_B+1.
SweepResult run_sweep(const traj::Trajectory& a, const traj::Trajectory& b, const SweepOptions& options);

SweepSummary summarize(const std::vector<SweepRow>& rows);

/// Linear-interpolated quantile of the finite entries; NaN if there are none.
double quantile(std::vector<double> values, double q);

/// Header plus one line per pair.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
std::string summary_line(const SweepSummary& summary);

struct BenchRow {
  int n_poses = 0;
  std::size_t pairs = 0;
  std::size_t failures = 0;
  double predict_total = 0.0;
  double solve_total = 0.0;
  double predict_avg = 0.0;
  double solve_avg = 0.0;
  double rel_min, rel_q1, rel_median, rel_q3, rel_max;
};

/// Full sweep in both modes for each trajectory length.
std::vector<BenchRow> run_bench(const std::vector<int>& lengths, const traj::SimulationConfig& base,
                                SweepOptions options);
BenchRow bench_row(int n_poses, const SweepResult& sweep);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// Fixed six decimals, i.e. microsecond resolution for seconds.
std::string format_seconds(double seconds);

}  // namespace deltaf::bench
