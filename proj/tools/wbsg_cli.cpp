// Experiment runner for weight-balanced distributed subgradient runs.
//
//   wbsg --preset paper_v --rounds 100000 --out out/paper_v
//   wbsg --generate 20,0.1,7 --preset consensus --rounds 10000 --out out/c
//   wbsg --config run.cfg --verify-bounds

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wbsg/csv.hpp"
#include "wbsg/errors.hpp"
#include "wbsg/experiment.hpp"

namespace {

std::string join_presets() {
  std::string out;
  for (const auto& name : wbsg::preset_names()) out += (out.empty() ? "" : ", ") + name;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed subgradient optimization over directed graphs with weight balancing"};

  std::string config_path, graph, generate, preset, schedule, checkpoints, out_dir;
  std::size_t rounds = 0, trace_stride = 0;
  double safety = 0.0;
  std::uint64_t seed = 0;
  bool verify_bounds = false, message_log = false, certificate = false;

  app.add_option("--config", config_path, "Flat 'key = value' config file; flags override it");
  auto* graph_opt = app.add_option("--graph", graph, "Edge-list file (SRC DST per line)");
  auto* gen_opt = app.add_option("--generate", generate,
                                 "Generate cycle + random extra edges: n,p,seed");
  graph_opt->excludes(gen_opt);
  auto* preset_opt = app.add_option("--preset", preset, "Preset: " + join_presets());
  auto* rounds_opt = app.add_option("--rounds", rounds, "Number of rounds T (>= 4)");
  auto* schedule_opt = app.add_option("--schedule", schedule, "Step sizes: sqrt | const:c");
  auto* safety_opt = app.add_option("--safety", safety, "Initial weight safety factor in (0, 1]");
  auto* checkpoints_opt =
      app.add_option("--checkpoints", checkpoints, "Comma-separated report rounds (each >= 4)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  auto* verify_opt = app.add_flag("--verify-bounds", verify_bounds,
                                  "Exit non-zero if a measured value exceeds its bound");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized presets");
  auto* stride_opt =
      app.add_option("--trace-stride", trace_stride, "Write every k-th round to trace.csv");
  auto* log_opt = app.add_flag("--message-log", message_log, "Also write messages.csv");
  auto* cert_opt = app.add_flag("--certificate", certificate,
                                "Also write balance.cert (weights balanced from all ones)");

  CLI11_PARSE(app, argc, argv);

  wbsg::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw wbsg::ConfigError("cannot open config file '" + config_path + "'");
      wbsg::parse_config_into(in, cfg);
    }
    auto set = [&cfg](CLI::Option* opt, const char* key, const std::string& value) {
      if (opt->count() > 0) wbsg::apply_setting(cfg, key, value);
    };
    set(graph_opt, "graph", graph);
    set(gen_opt, "generate", generate);
    set(preset_opt, "preset", preset);
    set(rounds_opt, "rounds", std::to_string(rounds));
    set(schedule_opt, "schedule", schedule);
    set(safety_opt, "safety", wbsg::format_real(safety));
    set(checkpoints_opt, "checkpoints", checkpoints);
    set(out_opt, "out", out_dir);
    set(seed_opt, "seed", std::to_string(seed));
    set(stride_opt, "trace-stride", std::to_string(trace_stride));
    if (verify_opt->count() > 0) cfg.verify_bounds = true;
    if (log_opt->count() > 0) cfg.message_log = true;
    if (cert_opt->count() > 0) cfg.balance_certificate = true;
    if (cfg.graph_file && gen_opt->count() > 0) cfg.graph_file.reset();
    if (cfg.generator && graph_opt->count() > 0) cfg.generator.reset();
  } catch (const wbsg::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return static_cast<int>(wbsg::ExitCode::validation);
  }

  const wbsg::ExperimentOutcome outcome = wbsg::run_experiment(cfg);
  if (outcome.code != wbsg::ExitCode::ok && !outcome.report) {
    std::cerr << outcome.message << '\n';
    return static_cast<int>(outcome.code);
  }

  const auto& report = *outcome.report;
  fmt::print("fitted C = {:.6g}, lambda = {:.12g}\n", report.fitted_C, report.fitted_lambda);
  fmt::print("{:>10} {:>16} {:>16} {:>16} {:>6}\n", "T", "ergodic_viol", "gap", "rate_stat",
             "bound");
  for (const auto& row : report.checkpoints) {
    fmt::print("{:>10} {:>16.6g} {:>16.6g} {:>16.6g} {:>6}\n", row.T, row.ergodic_violation,
               row.optimality_gap, row.rate_statistic, row.within_bounds ? "ok" : "over");
  }
  if (outcome.final_ergodic) {
    const auto& x_hat = *outcome.final_ergodic;
    double lo = INFINITY, hi = -INFINITY;
    for (double v : x_hat.data()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    fmt::print("ergodic averages at T = {}: [{:.9g}, {:.9g}]\n", cfg.rounds, lo, hi);
  }
  fmt::print("outputs in {}\n", cfg.out_dir.string());
  if (outcome.code != wbsg::ExitCode::ok) {
    std::cerr << outcome.message << '\n';
    return static_cast<int>(outcome.code);
  }
  return 0;
}
