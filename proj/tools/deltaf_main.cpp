#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltaf/sweep.hpp"
#include "deltaf/trajectory.hpp"

namespace fs = std::filesystem;
using deltaf::Error;
using deltaf::ErrorCode;
using namespace deltaf;

namespace {

struct RunConfig {
  traj::SimulationConfig sim;
  bench::Mode mode = bench::Mode::kBoth;
  int jobs = 0;
  bool timings = true;
  traj::AlignmentPair pair{1, 1};
  std::vector<int> lengths{20, 50};
  std::string traj_a;
  std::string traj_b;
  std::string out;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorCode::kParse, std::string("bad integer in ") + what + ": '" + item + "'");
    out.push_back(v);
  }
  return out;
}

traj::AlignmentPair parse_pair(const std::string& text) {
  const auto v = parse_int_list(text, "--pair");
  if (v.size() != 2) throw Error(ErrorCode::kParse, "--pair expects l,r");
  return {v[0], v[1]};
}

/// Keys mirror the long flag names with dashes replaced by underscores.
void apply_json(RunConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "poses") cfg.sim.n_poses = value.get<int>();
      else if (key == "trans_noise") cfg.sim.trans_noise_std = value.get<double>();
      else if (key == "rot_noise") cfg.sim.rot_noise_std = value.get<double>();
      else if (key == "seed") cfg.sim.seed = value.get<std::uint64_t>();
      else if (key == "max_heading") cfg.sim.max_heading = value.get<double>();
      else if (key == "mode") cfg.mode = bench::parse_mode(value.get<std::string>());
      else if (key == "jobs") cfg.jobs = value.get<int>();
      else if (key == "timings") cfg.timings = value.get<bool>();
      else if (key == "pair") {
        const auto p = value.get<std::vector<int>>();
        if (p.size() != 2) throw Error(ErrorCode::kParse, "config pair expects [l, r]");
        cfg.pair = {p[0], p[1]};
      } else if (key == "lengths") cfg.lengths = value.get<std::vector<int>>();
      else if (key == "traj_a") cfg.traj_a = value.get<std::string>();
      else if (key == "traj_b") cfg.traj_b = value.get<std::string>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "config " + path.string() + ": " + e.what());
  }
}

void check(const RunConfig& cfg) {
  if (cfg.sim.n_poses < 2) throw Error(ErrorCode::kInvalidArgument, "poses must be at least 2");
  if (!(cfg.sim.trans_noise_std >= 0.0) || !(cfg.sim.rot_noise_std >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "noise standard deviations must be non-negative");
  if (cfg.jobs < 0) throw Error(ErrorCode::kInvalidArgument, "jobs must be non-negative");
  if (cfg.traj_a.empty() != cfg.traj_b.empty())
    throw Error(ErrorCode::kInvalidArgument, "--traj-a and --traj-b go together");
}

std::pair<traj::Trajectory, traj::Trajectory> inputs(const RunConfig& cfg) {
  if (!cfg.traj_a.empty()) return {traj::load_trajectory(cfg.traj_a), traj::load_trajectory(cfg.traj_b)};
  auto sim = traj::simulate_pair(cfg.sim);
  return {std::move(sim.a), std::move(sim.b)};
}

/// Writes to --out when given, stdout otherwise.
template <class Fn>
void emit(const std::string& out, Fn&& write) {
  if (out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + out);
  write(file);
  if (!file) throw Error(ErrorCode::kIo, "write failed for " + out);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void cmd_simulate(const RunConfig& cfg) {
  const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const auto sim = traj::simulate_pair(cfg.sim);
  traj::save_trajectory(dir / "traj_a.csv", sim.a);
  traj::save_trajectory(dir / "traj_b.csv", sim.b);
  traj::save_trajectory(dir / "traj_a_true.csv", sim.a_true);
  traj::save_trajectory(dir / "traj_b_true.csv", sim.b_true);
  std::cout << "wrote," << (dir / "traj_a.csv").string() << "," << (dir / "traj_b.csv").string() << ","
            << (dir / "traj_a_true.csv").string() << "," << (dir / "traj_b_true.csv").string() << "\n";
}

void cmd_predict(const RunConfig& cfg) {
  const auto [a, b] = inputs(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const double df = traj::predict_alignment_cost(a, b, cfg.pair);
  const double t = cfg.timings ? seconds_since(t0) : 0.0;
  emit(cfg.out, [&](std::ostream& os) {
    os << "l,r,delta_f,t_predict\n"
       << cfg.pair.l << "," << cfg.pair.r << "," << num(df) << "," << bench::format_seconds(t) << "\n";
  });
}

void cmd_solve(const RunConfig& cfg) {
  const auto [a, b] = inputs(cfg);
  const bool predict = cfg.mode != bench::Mode::kSolve;
  double df = std::nan("");
  double t_predict = 0.0;
  if (predict) {
    const auto t0 = std::chrono::steady_clock::now();
    df = traj::predict_alignment_cost(a, b, cfg.pair);
    t_predict = cfg.timings ? seconds_since(t0) : 0.0;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = traj::solve_alignment(a, b, cfg.pair);
  const double t_solve = cfg.timings ? seconds_since(t0) : 0.0;
  const double rel = predict ? traj::relative_error(df, sol.f_real) : std::nan("");
  emit(cfg.out, [&](std::ostream& os) {
    os << "l,r,delta_f,f_real,rel_error,iterations,t_predict,t_solve\n"
       << cfg.pair.l << "," << cfg.pair.r << "," << num(df) << "," << num(sol.f_real) << "," << num(rel) << ","
       << sol.report.iterations << "," << bench::format_seconds(t_predict) << "," << bench::format_seconds(t_solve)
       << "\n";
  });
}

void cmd_sweep(const RunConfig& cfg) {
  const auto [a, b] = inputs(cfg);
  bench::SweepOptions opt;
  opt.mode = cfg.mode;
  opt.jobs = cfg.jobs;
  opt.record_timings = cfg.timings;
  const auto result = bench::run_sweep(a, b, opt);
  emit(cfg.out, [&](std::ostream& os) { bench::write_sweep_csv(os, result); });
  // Keep stdout a clean CSV when the grid goes there.
  (cfg.out.empty() ? std::cerr : std::cout) << bench::summary_line(result.summary) << "\n";
}

void cmd_bench(const RunConfig& cfg) {
  if (cfg.lengths.empty()) throw Error(ErrorCode::kInvalidArgument, "bench needs at least one length, e.g. --lengths 20,50");
  for (int n : cfg.lengths)
    if (n < 2) throw Error(ErrorCode::kInvalidArgument, "every length must be at least 2");
  bench::SweepOptions opt;
  opt.jobs = cfg.jobs;
  opt.record_timings = cfg.timings;
  const auto rows = bench::run_bench(cfg.lengths, cfg.sim, opt);
  emit(cfg.out, [&](std::ostream& os) { bench::write_bench_csv(os, rows); });
}

int fail(ErrorCode code, const std::string& message) {
  std::cerr << "error," << to_string(code) << "," << message << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form prediction of the cost of adding constraints to least-squares problems"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::optional<int> poses;
  std::optional<double> trans_noise, rot_noise, max_heading;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode, pair, out, traj_a, traj_b, lengths, config;
  std::optional<int> jobs;
  bool no_timings = false;

  auto add_sim = [&](CLI::App* cmd) {
    cmd->add_option("--poses", poses, "Poses per trajectory");
    cmd->add_option("--trans-noise", trans_noise, "Translation noise std [m]");
    cmd->add_option("--rot-noise", rot_noise, "Rotation noise std [rad]");
    cmd->add_option("--max-heading", max_heading, "Largest heading change per step [rad]");
    cmd->add_option("--seed", seed, "Simulation seed");
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON file with defaults; flags override it");
    cmd->add_option("--out", out, "Output path");
  };
  auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--traj-a", traj_a, "Trajectory A file (simulate when omitted)");
    cmd->add_option("--traj-b", traj_b, "Trajectory B file");
  };
  auto add_timing = [&](CLI::App* cmd) {
    cmd->add_flag("--no-timings", no_timings, "Write zero timings so the output is reproducible byte for byte");
  };

  auto* simulate = app.add_subcommand("simulate", "Write two noisy trajectories and their noise-free references");
  add_sim(simulate);
  add_common(simulate);

  auto* predict = app.add_subcommand("predict", "Predicted cost of aligning pose l of A with pose r of B");
  auto* solve = app.add_subcommand("solve", "Solve one alignment to optimality");
  for (auto* cmd : {predict, solve}) {
    add_sim(cmd);
    add_common(cmd);
    add_inputs(cmd);
    add_timing(cmd);
    cmd->add_option("--pair", pair, "Aligned poses as l,r (1-based)");
  }
  solve->add_option("--mode", mode, "both (default) also reports the prediction; solve skips it");

  auto* sweep = app.add_subcommand("sweep", "Every alignment pair, as a CSV grid");
  add_sim(sweep);
  add_common(sweep);
  add_inputs(sweep);
  add_timing(sweep);
  sweep->add_option("--mode", mode, "predict, solve or both");
  sweep->add_option("--jobs", jobs, "Worker threads (0: all cores)");

  auto* bench_cmd = app.add_subcommand("bench", "Timing and error table over trajectory lengths");
  add_sim(bench_cmd);
  add_common(bench_cmd);
  add_timing(bench_cmd);
  bench_cmd->add_option("--lengths", lengths, "Comma-separated pose counts");
  bench_cmd->add_option("--jobs", jobs, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    return fail(ErrorCode::kInvalidArgument, e.what());
  }

  try {
    RunConfig cfg;
    if (config) apply_json(cfg, *config);
    if (poses) cfg.sim.n_poses = *poses;
    if (trans_noise) cfg.sim.trans_noise_std = *trans_noise;
    if (rot_noise) cfg.sim.rot_noise_std = *rot_noise;
    if (max_heading) cfg.sim.max_heading = *max_heading;
    if (seed) cfg.sim.seed = *seed;
    if (mode) cfg.mode = bench::parse_mode(*mode);
    if (jobs) cfg.jobs = *jobs;
    if (no_timings) cfg.timings = false;
    if (pair) cfg.pair = parse_pair(*pair);
    if (lengths) cfg.lengths = parse_int_list(*lengths, "--lengths");
    if (traj_a) cfg.traj_a = *traj_a;
    if (traj_b) cfg.traj_b = *traj_b;
    if (out) cfg.out = *out;
    check(cfg);

    if (*simulate) cmd_simulate(cfg);
    else if (*predict) cmd_predict(cfg);
    else if (*solve) cmd_solve(cfg);
    else if (*sweep) cmd_sweep(cfg);
    else cmd_bench(cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument && *bench_cmd) std::cerr << bench_cmd->help();
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::kInvalidArgument, e.what());
  }
  return 0;
}
