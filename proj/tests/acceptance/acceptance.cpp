// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "wbsg/analysis.hpp"
#include "wbsg/balancing.hpp"
#include "wbsg/digraph.hpp"
#include "wbsg/engine.hpp"
#include "wbsg/errors.hpp"
#include "wbsg/experiment.hpp"
#include "wbsg/simkernel.hpp"

using namespace wbsg;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

DiGraph cycle(std::size_t n) { return generate_graph(n, 0.0, 0); }
DiGraph complete(std::size_t n) { return generate_graph(n, 1.0, 0); }
DiGraph chord3() { return DiGraph(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}}); }

struct Named {
  std::string name;
  DiGraph graph;
};

std::vector<Named> small_suite() {
  return {{"c3", cycle(3)},       {"g4", chord3()},       {"c5", cycle(5)},
          {"k3", complete(3)},    {"k4", complete(4)},    {"k5", complete(5)}};
}

std::vector<Named> all_test_graphs() {
  std::vector<Named> graphs = small_suite();
  graphs.push_back({"two", cycle(2)});
  graphs.push_back({"c20", cycle(20)});
  graphs.push_back({"paper_v", paper_v_graph()});
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    graphs.push_back({fmt::format("rand10_{}", seed), generate_graph(10, 0.2, seed)});
  return graphs;
}

Matrix targets_1_to_n(std::size_t n) {
  Matrix a(n, 1);
  for (std::size_t i = 0; i < n; ++i) a(i, 0) = static_cast<double>(i + 1);
  return a;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Criterion 1
Verdict balance_convergence() {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  const std::size_t sizes[] = {5, 20, 50};
  std::size_t worst_rounds = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const std::size_t n = sizes[k % 3];
    const double p = 0.02 + 0.04 * static_cast<double>(k % 5);
    const DiGraph g = generate_graph(n, p, 100 + k);
    try {
      BalanceResult r =
          run_to_balance(g, WeightVector{std::vector<double>(n, 1.0), 0}, 1e-9, 100000);
      worst_rounds = std::max(worst_rounds, r.rounds);
    } catch (const ConvergenceError& e) {
      v.require(false, fmt::format("n={} seed={}: {}", n, 100 + k, e.what()));
    }
  }
  BalanceResult g4 = run_to_balance(chord3(), WeightVector{{1.0, 1.0, 1.0}, 0}, 1e-12, 100000);
  const double r1 = g4.weights[1] / g4.weights[0];
  const double r2 = g4.weights[2] / g4.weights[0];
  v.require(std::abs(r1 - 1.0) <= 1e-8 && std::abs(r2 / 2.0 - 1.0) <= 1e-8,
            fmt::format("g4 ratios {} {}", r1, r2));
  const double elapsed = seconds_since(start);
  v.require(elapsed < 5.0, fmt::format("took {:.2f} s", elapsed));
  v.detail = v.pass ? fmt::format("20 graphs balanced, worst {} rounds; g4 ratios 1:{:.10f}:{:.10f}; "
                                  "{:.2f} s",
                                  worst_rounds, r1, r2, elapsed)
                    : v.detail;
  return v;
}

// Criterion 2
Verdict boundedness() {
  Verdict v;
  double worst = 0.0;
  for (const Named& item : all_test_graphs()) {
    const DiGraph& g = item.graph;
    WeightVector w = init_weights(g, compute_stats(g), kDefaultSafety);
    for (std::size_t t = 0; t <= 10000; ++t) {
      const double m = max_outgoing_weight(g, w);
      worst = std::max(worst, m);
      if (!(m < 1.0)) {
        v.require(false, fmt::format("{}: w d_out = {} at t={}", item.name, m, t));
        break;
      }
      w = weight_step(g, w);
    }
  }
  const DiGraph c = cycle(6);
  bool detected = false;
  try {
    run(c, zero_objective(6), Matrix(6, 1), 10, StepSchedule::sqrt_default(), 1.0);
  } catch (const InitializationError&) {
    detected = true;
  }
  v.require(detected, "safety 1 on a cycle was not rejected");
  ExperimentConfig cfg;
  cfg.generator = GeneratorSpec{6, 0.0, 0};
  cfg.safety = 1.0;
  cfg.rounds = 10;
  cfg.out_dir = fs::temp_directory_path() / "wbsg_acceptance_c2";
  ExperimentOutcome outcome = run_experiment(cfg);
  v.require(outcome.code == ExitCode::run_failure, "experiment did not report the zero coefficient");
  if (v.pass)
    v.detail = fmt::format("max w d_out = {:.6g} under safety 1/2; cycle at safety 1 -> \"{}\"",
                           worst, outcome.message);
  return v;
}

// Criterion 3
Verdict stochasticity() {
  Verdict v;
  double worst_col = 0.0;
  double worst_row = 0.0;
  std::size_t balanced_rounds = 0;
  for (const Named& item : all_test_graphs()) {
    const DiGraph& g = item.graph;
    WeightVector w = init_weights(g, compute_stats(g));
    for (std::size_t t = 0; t < 10000; ++t) {
      PropagationMatrix Q = build_Q(g, w);
      worst_col = std::max(worst_col, Q.column_sum_error());
      if (balance_residual(g, w) <= 1e-9) {
        ++balanced_rounds;
        worst_row = std::max(worst_row, Q.row_sum_error());
      }
      w = weight_step(g, w);
    }
    // Also from unit weights scaled into range, where balancing is visible.
    const GraphStats stats = compute_stats(g);
    WeightVector u{std::vector<double>(g.node_count(), 0.5 / static_cast<double>(stats.max_out_degree)), 0};
    BalanceResult r = run_to_balance(g, u, 1e-9);
    PropagationMatrix Q = build_Q(g, r.weights);
    worst_row = std::max(worst_row, Q.row_sum_error());
    ++balanced_rounds;
  }
  v.require(worst_col <= 1e-12, fmt::format("column sum error {}", worst_col));
  v.require(worst_row <= 1e-8, fmt::format("row sum error {}", worst_row));
  if (v.pass)
    v.detail = fmt::format("max column error {:.3g}; max row error {:.3g} over {} balanced rounds",
                           worst_col, worst_row, balanced_rounds);
  return v;
}

// Criterion 4
Verdict uniformization() {
  Verdict v;
  std::string summary;
  for (const Named& item : small_suite()) {
    const DiGraph& g = item.graph;
    const std::size_t n = g.node_count();
    RunTrace trace = run(g, zero_objective(n), Matrix(n, 1), 1000, StepSchedule::sqrt_default());
    PhiSeries phi = phi_series(g, trace, 0, 999);
    const double at_1000 = phi.deviations[1000];
    v.require(at_1000 <= 1e-10, fmt::format("{}: deviation {} at t=1000", item.name, at_1000));
    GeometricFit fit;
    try {
      fit = fit_geometric(phi);
    } catch (const ConvergenceError& e) {
      v.require(false, fmt::format("{}: {}", item.name, e.what()));
      continue;
    }
    v.require(fit.lambda < 1.0, fmt::format("{}: lambda {}", item.name, fit.lambda));
    // Every product length up to 1000 whose deviation is above the rounding
    // floor; below it the entries are 1/n to the last bit.
    double worst_ratio = 0.0;
    for (std::size_t k = 1; k <= 1000; ++k)
      if (phi.deviations[k] > FitWindow{}.floor)
        worst_ratio = std::max(worst_ratio, phi.deviations[k] / fit.bound(k));
    v.require(worst_ratio <= kBoundSlack,
              fmt::format("{}: measured/fitted ratio {:.3f}", item.name, worst_ratio));
    summary += fmt::format("{} lambda={:.5f} ratio={:.3f} dev1000={:.2g}; ", item.name,
                           fit.lambda, worst_ratio, at_1000);
  }
  if (v.pass) v.detail = summary;
  return v;
}

// Criterion 5
Verdict consensus() {
  Verdict v;
  std::string summary;
  std::vector<Named> graphs = small_suite();
  graphs.push_back({"c20", cycle(20)});
  for (const Named& item : graphs) {
    const DiGraph& g = item.graph;
    const std::size_t n = g.node_count();
    ObjectiveSpec obj = zero_objective(n);
    RunState state{0, Matrix(n, 1), init_weights(g, compute_stats(g)), 1.0};
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += state.estimates(i, 0) = static_cast<double>(i);
    mean /= static_cast<double>(n);

    std::vector<double> ts, logs;
    double error = 0.0;
    std::size_t t = 0;
    const StepSchedule schedule = StepSchedule::sqrt_default();
    for (; t < 2'000'000; ++t) {
      error = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        error = std::max(error, std::abs(state.estimates(i, 0) - mean));
      if (error <= 1e-10) break;
      if (error <= 1e-3) {
        ts.push_back(static_cast<double>(t));
        logs.push_back(std::log(error));
      }
      state = estimate_step(g, state, obj, schedule).next;
    }
    v.require(error <= 1e-8, fmt::format("{}: error {} after {} rounds", item.name, error, t));
    if (ts.size() < 2) {
      v.require(false, fmt::format("{}: too few tail samples", item.name));
      continue;
    }
    LinearFit fit = fit_line(ts, logs);
    v.require(fit.slope < 0.0 && fit.r_squared >= 0.99,
              fmt::format("{}: slope {} R2 {}", item.name, fit.slope, fit.r_squared));
    summary += fmt::format("{} {} rounds R2={:.4f}; ", item.name, t, fit.r_squared);
  }
  if (v.pass) v.detail = summary;
  return v;
}

struct PaperRun {
  ExperimentOutcome outcome;
  double seconds = 0.0;
};

PaperRun run_paper_v() {
  ExperimentConfig cfg;
  cfg.preset = "paper_v";
  cfg.rounds = 100000;
  cfg.checkpoints = {100, 1000, 10000, 100000};
  cfg.trace_stride = 1000;
  cfg.out_dir = fs::temp_directory_path() / "wbsg_acceptance_paper_v";
  const auto start = std::chrono::steady_clock::now();
  PaperRun r{run_experiment(cfg), 0.0};
  r.seconds = seconds_since(start);
  return r;
}

// Criterion 6
Verdict paper_experiment(const PaperRun& r) {
  Verdict v;
  if (r.outcome.code != ExitCode::ok || !r.outcome.report || !r.outcome.final_ergodic) {
    v.require(false, r.outcome.message);
    return v;
  }
  const Matrix& xh = *r.outcome.final_ergodic;
  double worst = 0.0;
  for (std::size_t i = 0; i < xh.rows(); ++i) worst = std::max(worst, std::abs(xh(i, 0) - 10.5));
  const bool close = worst < 0.05;

  const auto& rows = r.outcome.report->checkpoints;
  std::string gaps;
  bool decreasing = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    gaps += fmt::format("{}{:.6g}", k ? "," : "", rows[k].optimality_gap);
    if (k > 0 && !(rows[k].optimality_gap < rows[k - 1].optimality_gap)) decreasing = false;
  }
  const bool bounded_rate = rows.back().rate_statistic <= 3.0 * rows.front().rate_statistic;
  const bool fast = r.seconds < 60.0;

  v.require(close, "estimates not within 0.05 of 10.5");
  v.require(decreasing, "gap not decreasing");
  v.require(bounded_rate, "rate statistic grew more than 3x");
  v.require(fast, "over 60 s");
  auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
  v.detail = fmt::format(
      "max |x_hat_i - 10.5| = {:.4f} [{}]; gaps [{}] decreasing [{}]; rate statistic {:.4g} -> "
      "{:.4g} [{}]; {:.1f} s [{}]",
      worst, mark(close), gaps, mark(decreasing), rows.front().rate_statistic,
      rows.back().rate_statistic, mark(bounded_rate), r.seconds, mark(fast));
  return v;
}

// Criterion 7
Verdict bound_audit(const PaperRun& r) {
  Verdict v;
  std::string summary;
  auto audit = [&](const std::string& name, const DiagnosticsReport& report) {
    v.require(report.fitted_lambda < 1.0, fmt::format("{}: lambda {}", name, report.fitted_lambda));
    double worst = 0.0;
    for (const CheckpointRow& row : report.checkpoints) {
      v.require(row.T >= kMinCheckpoint, fmt::format("{}: checkpoint {} < 4", name, row.T));
      const double ratio = row.ergodic_violation / (kBoundSlack * row.consensus_rate_rhs);
      worst = std::max(worst, ratio);
      v.require(ratio <= 1.0, fmt::format("{}: T={} violation {} > 1.5 x {}", name, row.T,
                                          row.ergodic_violation, row.consensus_rate_rhs));
    }
    summary += fmt::format("{} lambda={:.12g} worst measured/(1.5 rhs)={:.3g}; ", name,
                           report.fitted_lambda, worst);
  };
  if (!r.outcome.report) {
    v.require(false, "paper_v run failed");
  } else {
    audit("paper_v", *r.outcome.report);
  }
  for (const Named& item : small_suite()) {
    const DiGraph& g = item.graph;
    const std::size_t n = g.node_count();
    ObjectiveSpec obj = quadratic_objective(targets_1_to_n(n));
    RunTrace trace = run(g, obj, Matrix(n, 1), 10000, StepSchedule::sqrt_default());
    GeometricFit fit = fit_geometric(phi_series(g, trace, 0, 1000));
    std::vector<std::size_t> checkpoints{4, 10, 100, 1000, 10000};
    audit(item.name, rate_report(trace, obj, fit, checkpoints));
  }
  if (v.pass) v.detail = summary;
  return v;
}

// Criterion 8
Verdict decentralization() {
  Verdict v;
  std::size_t runs = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const DiGraph g = generate_graph(4 + seed % 9, 0.15 + 0.05 * static_cast<double>(seed % 4), seed);
    for (const std::string& name : preset_names()) {
      Preset p = make_preset(name, g, seed);
      for (const StepSchedule& s : {StepSchedule::sqrt_default(), StepSchedule::constant(0.01)}) {
        RunTrace a = simulate(g, p.objective, p.x0, 200, s);
        RunTrace b = run(g, p.objective, p.x0, 200, s);
        ++runs;
        v.require(traces_bit_identical(a, b), fmt::format("seed {} preset {}", seed, name));
      }
    }
  }
  if (v.pass) v.detail = fmt::format("{} runs bit-identical (50 seeds x {} presets x 2 schedules)",
                                     runs, preset_names().size());
  return v;
}

// Criterion 9
Verdict oracle_equivalence() {
  Verdict v;
  double worst_step = 0.0;
  double worst_y = 0.0;
  std::vector<Named> graphs = small_suite();
  graphs.push_back({"paper_v", paper_v_graph()});
  for (const Named& item : graphs) {
    const DiGraph& g = item.graph;
    const std::size_t n = g.node_count();
    Preset p = make_preset("paper_v_noisy", g, 3);
    const std::size_t T = 20000;
    RunTrace trace = run(g, p.objective, p.x0, T, StepSchedule::sqrt_default());
    for (std::size_t t = 0; t < T; ++t) {
      const Matrix Q = build_Q(g, trace.states[t].weights).entries;
      const Matrix& x = trace.states[t].estimates;
      for (std::size_t i = 0; i < n; ++i) {
        double expected = 0.0;
        for (std::size_t j = 0; j < n; ++j) expected += Q(i, j) * x(j, 0);
        expected -= trace.states[t].step * trace.subgrads[t](i, 0);
        worst_step = std::max(worst_step, std::abs(trace.states[t + 1].estimates(i, 0) - expected));
      }
    }
    AuxiliarySequence aux = auxiliary_y(trace, T);
    for (std::size_t t = 0; t <= T; t += 250) {
      worst_y = std::max(worst_y, std::abs(aux.y[t][0] - auxiliary_y_direct(trace, t)[0]));
    }
  }
  v.require(worst_step <= 1e-12, fmt::format("step residual {}", worst_step));
  v.require(worst_y <= 1e-12, fmt::format("y recursion vs closed form {}", worst_y));
  if (v.pass)
    v.detail = fmt::format("max |x(t+1) - Q x + a g| = {:.3g}; max |y_rec - y_closed| = {:.3g}",
                           worst_step, worst_y);
  return v;
}

// Criterion 10
Verdict reproducibility() {
  Verdict v;
  ExperimentConfig cfg;
  cfg.preset = "paper_v_noisy";
  cfg.generator = GeneratorSpec{12, 0.2, 77};
  cfg.seed = 9;
  cfg.rounds = 3000;
  cfg.message_log = true;
  cfg.balance_certificate = true;
  std::vector<fs::path> dirs;
  for (int k = 0; k < 2; ++k) {
    cfg.out_dir = fs::temp_directory_path() / fmt::format("wbsg_acceptance_repro_{}", k);
    fs::remove_all(cfg.out_dir);
    ExperimentOutcome o = run_experiment(cfg);
    v.require(o.code == ExitCode::ok, o.message);
    dirs.push_back(cfg.out_dir);
  }
  for (const char* f : {"trace.csv", "report.csv", "messages.csv", "graph.edges", "balance.cert"}) {
    const std::string a = slurp(dirs[0] / f);
    v.require(!a.empty() && a == slurp(dirs[1] / f), fmt::format("{} differs", f));
  }
  if (v.pass) v.detail = "trace, report, messages, graph and certificate byte-identical";
  return v;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    std::printf("[%s] criterion %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  };
  report(1, "balance convergence", balance_convergence());
  report(2, "weight boundedness", boundedness());
  report(3, "stochasticity", stochasticity());
  report(4, "geometric uniformization", uniformization());
  report(5, "consensus", consensus());
  const PaperRun paper = run_paper_v();
  report(6, "paper_v experiment", paper_experiment(paper));
  report(7, "bound audit", bound_audit(paper));
  report(8, "decentralization equivalence", decentralization());
  report(9, "oracle equivalence", oracle_equivalence());
  report(10, "reproducibility", reproducibility());
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
