#include "deltaf/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "deltaf/csv.hpp"

namespace deltaf::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_value(double v) { return std::isnan(v) ? std::string("nan") : csv::format_double(v); }

void evaluate_pair(const traj::Trajectory& a, const traj::Trajectory& b, const SweepOptions& opt, SweepRow& row) {
  const traj::AlignmentPair pair{row.l, row.r};
  if (opt.mode != Mode::kSolve) {
    const auto start = Clock::now();
    try {
      row.delta_f = traj::predict_alignment_cost(a, b, pair);
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
    }
    row.t_predict = seconds_since(start);
  }
  if (opt.mode != Mode::kPredict) {
    const auto start = Clock::now();
    try {
      row.f_real = traj::solve_alignment(a, b, pair, opt.solver).f_real;
    } catch (const Error& e) {
      if (row.status == "ok") row.status = std::string(to_string(e.code()));
    }
    row.t_solve = seconds_since(start);
  }
  if (opt.mode == Mode::kBoth && !std::isnan(row.delta_f) && !std::isnan(row.f_real)) {
    row.rel_error = traj::relative_error(row.delta_f, row.f_real);
  }
  if (!opt.record_timings) {
    row.t_predict = 0.0;
    row.t_solve = 0.0;
  }
}

}  // namespace

Mode parse_mode(std::string_view text) {
  if (text == "predict") return Mode::kPredict;
  if (text == "solve") return Mode::kSolve;
  if (text == "both") return Mode::kBoth;
  throw Error(ErrorCode::kInvalidArgument, "mode must be predict, solve or both");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kPredict: return "predict";
    case Mode::kSolve: return "solve";
    case Mode::kBoth: return "both";
  }
  return "both";
}

double quantile(std::vector<double> values, double q) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SweepSummary summarize(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  s.rows = rows.size();
  std::vector<double> rel;
  rel.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.status != "ok") ++s.failures;
    rel.push_back(row.rel_error);
    s.total_predict += row.t_predict;
    s.total_solve += row.t_solve;
  }
  s.max_rel_error = quantile(rel, 1.0);
  s.median_rel_error = quantile(rel, 0.5);
  s.p99_rel_error = quantile(rel, 0.99);
  return s;
}

SweepResult run_sweep(const traj::Trajectory& a, const traj::Trajectory& b, const SweepOptions& options) {
  a.validate();
  b.validate();
  SweepResult result;
  for (int l = 1; l <= a.num_poses(); ++l) {
    for (int r = 1; r <= b.num_poses(); ++r) {
      SweepRow row{.l = l, .r = r, .delta_f = kNaN, .f_real = kNaN, .rel_error = kNaN};
      result.rows.push_back(row);
    }
  }

  int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, static_cast<int>(result.rows.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) evaluate_pair(a, b, options, result.rows[i]);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  result.summary = summarize(result.rows);
  return result;
}

std::string format_seconds(double seconds) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), seconds, std::chars_format::fixed, 6);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "l,r,delta_f,f_real,rel_error,t_predict,t_solve,status\n";
  for (const auto& row : result.rows) {
    out << row.l << ',' << row.r << ',' << format_value(row.delta_f) << ',' << format_value(row.f_real) << ','
        << format_value(row.rel_error) << ',' << format_seconds(row.t_predict) << ','
        << format_seconds(row.t_solve) << ',' << row.status << '\n';
  }
}

std::string summary_line(const SweepSummary& s) {
  return "summary,rows=" + std::to_string(s.rows) + ",failures=" + std::to_string(s.failures) +
         ",max_rel_error=" + format_value(s.max_rel_error) + ",median_rel_error=" +
         format_value(s.median_rel_error) + ",total_predict=" + format_seconds(s.total_predict) +
         ",total_solve=" + format_seconds(s.total_solve);
}

BenchRow bench_row(int n_poses, const SweepResult& sweep) {
  BenchRow row;
  row.n_poses = n_poses;
  row.pairs = sweep.rows.size();
  row.failures = sweep.summary.failures;
  row.predict_total = sweep.summary.total_predict;
  row.solve_total = sweep.summary.total_solve;
  const double n = std::max<double>(1.0, static_cast<double>(row.pairs));
  row.predict_avg = row.predict_total / n;
  row.solve_avg = row.solve_total / n;
  std::vector<double> rel;
  rel.reserve(sweep.rows.size());
  for (const auto& r : sweep.rows) rel.push_back(r.rel_error);
  row.rel_min = quantile(rel, 0.0);
  row.rel_q1 = quantile(rel, 0.25);
  row.rel_median = quantile(rel, 0.5);
  row.rel_q3 = quantile(rel, 0.75);
  row.rel_max = quantile(rel, 1.0);
  return row;
}

std::vector<BenchRow> run_bench(const std::vector<int>& lengths, const traj::SimulationConfig& base,
                                SweepOptions options) {
  if (lengths.empty()) throw Error(ErrorCode::kInvalidArgument, "bench needs at least one trajectory length");
  options.mode = Mode::kBoth;
  std::vector<BenchRow> rows;
  rows.reserve(lengths.size());
  for (const int n : lengths) {
    traj::SimulationConfig cfg = base;
    cfg.n_poses = n;
    const auto sim = traj::simulate_pair(cfg);
    rows.push_back(bench_row(n, run_sweep(sim.a, sim.b, options)));
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n_poses,pairs,failures,predict_total,solve_total,predict_avg,solve_avg,"
         "rel_min,rel_q1,rel_median,rel_q3,rel_max\n";
  for (const auto& r : rows) {
    out << r.n_poses << ',' << r.pairs << ',' << r.failures << ',' << format_seconds(r.predict_total) << ','
        << format_seconds(r.solve_total) << ',' << format_seconds(r.predict_avg) << ','
        << format_seconds(r.solve_avg) << ',' << format_value(r.rel_min) << ',' << format_value(r.rel_q1) << ','
        << format_value(r.rel_median) << ',' << format_value(r.rel_q3) << ',' << format_value(r.rel_max) << '\n';
  }
}

}  // namespace deltaf::bench
