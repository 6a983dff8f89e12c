#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbsg/analysis.hpp"
#include "wbsg/digraph.hpp"
#include "wbsg/engine.hpp"
#include "wbsg/objective.hpp"

namespace wbsg {

// Directed n-cycle 0 -> 1 -> ... -> n-1 -> 0, then every other ordered pair
// (row-major over (i, j)) added independently with probability
// extra_edge_prob. Draws come from std::mt19937_64 seeded with `seed`,
// mapped to [0, 1) by taking the top 53 bits, so the result does not depend
// on the standard library's distribution implementations. Labels are
// "1".."n". Throws ConfigError for n < 2 or p outside [0, 1].
DiGraph generate_graph(std::size_t n, double extra_edge_prob, std::uint64_t seed);

inline constexpr std::size_t kPaperNodes = 20;
inline constexpr double kPaperExtraEdgeProb = 0.15;
inline constexpr std::uint64_t kPaperGraphSeed = 2015;

// The pinned 20-node topology used by the paper_v preset; identical to
// data/paper_v.edges.
DiGraph paper_v_graph();

struct GeneratorSpec {
  std::size_t n = 0;
  double extra_edge_prob = 0.0;
  std::uint64_t seed = 0;
};

// Parses "n,p,seed".
GeneratorSpec parse_generator_spec(std::string_view text);

// Objective plus initial estimates for a named preset on a given graph.
// Node i (internal id) plays agent i+1:
//   paper_v, quadratic_estimation  f_i = 1/2 (x - (i+1))^2, x(0) = 0
//   paper_v_noisy                  f_i = 1/2 (x - a_i)^2, a_i = 10 + N(0, 1), x(0) = 0
//   abs_deviation                  f_i = |x - (i+1)|, x(0) = 0
//   consensus, zero                f_i = 0, x_i(0) = i
struct Preset {
  ObjectiveSpec objective;
  Matrix x0;
};

Preset make_preset(std::string_view name, const DiGraph& g, std::uint64_t seed);
std::vector<std::string> preset_names();

struct ExperimentConfig {
  std::optional<std::filesystem::path> graph_file;
  std::optional<GeneratorSpec> generator;
  std::string preset = "paper_v";
  std::size_t rounds = 100000;
  StepSchedule schedule = StepSchedule::sqrt_default();
  double safety = kDefaultSafety;
  std::vector<std::size_t> checkpoints;  // empty: powers of ten up to T, plus T
  std::filesystem::path out_dir = "out";
  bool verify_bounds = false;
  std::uint64_t seed = 1;
  std::size_t trace_stride = 1;
  bool message_log = false;
  bool balance_certificate = false;

  // Throws ConfigError: T >= 4, safety in (0, 1], checkpoints in [4, T].
  void validate() const;
  std::vector<std::size_t> effective_checkpoints() const;
};

// Applies one "key = value" setting; keys match the long CLI flags
// (graph, generate, preset, rounds, schedule, safety, checkpoints, out,
// verify-bounds, seed, trace-stride, message-log, certificate).
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Flat "key = value" file, '#' comments and blank lines ignored.
ExperimentConfig parse_config(std::istream& in);
void parse_config_into(std::istream& in, ExperimentConfig& cfg);

// Replayable echo of the effective configuration.
void write_config_echo(std::ostream& out, const ExperimentConfig& cfg, const ConfigDigest& digest);

enum class ExitCode : int {
  ok = 0,
  validation = 2,
  run_failure = 3,
  equivalence_mismatch = 4,
  bound_violation = 5,
  io_failure = 6,
};

struct ExperimentOutcome {
  ExitCode code = ExitCode::ok;
  std::string message;
  std::optional<DiagnosticsReport> report;
  std::optional<Matrix> final_ergodic;  // x_hat(T)
};

// Loads or generates the graph, runs the message-passing simulation and the
// centralized engine, checks they agree bit for bit, and writes trace.csv,
// report.csv, graph.edges and config.echo (plus messages.csv and
// balance.cert when requested) into cfg.out_dir. Never throws for
// configuration or run problems; those come back as distinct exit codes.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

}  // namespace wbsg
