#include "wbsg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "wbsg/balancing.hpp"
#include "wbsg/csv.hpp"
#include "wbsg/errors.hpp"
#include "wbsg/simkernel.hpp"

namespace wbsg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("bad {} '{}'", what, text));
  }
  return value;
}

bool parse_bool(std::string_view text, std::string_view what) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(fmt::format("bad boolean for {}: '{}'", what, text));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    auto end = text.find(sep, begin);
    parts.push_back(trim(text.substr(begin, end - begin)));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

// Top 53 bits of a 64-bit draw as a double in [0, 1).
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

DiGraph generate_graph(std::size_t n, double extra_edge_prob, std::uint64_t seed) {
  if (n < 2) throw ConfigError(fmt::format("generator needs n >= 2, got {}", n));
  if (!(extra_edge_prob >= 0.0 && extra_edge_prob <= 1.0)) {
    throw ConfigError(fmt::format("extra edge probability {} outside [0, 1]", extra_edge_prob));
  }
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  std::mt19937_64 rng(seed);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i == j || j == (i + 1) % n) continue;
      if (unit_draw(rng) < extra_edge_prob) edges.push_back({i, j});
    }
  }
  return DiGraph(n, std::move(edges));
}

DiGraph paper_v_graph() {
  return generate_graph(kPaperNodes, kPaperExtraEdgeProb, kPaperGraphSeed);
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  auto parts = split(text, ',');
  if (parts.size() != 3) {
    throw ConfigError(fmt::format("generator spec '{}' is not n,p,seed", text));
  }
  return GeneratorSpec{parse_number<std::size_t>(parts[0], "node count"),
                       parse_number<double>(parts[1], "edge probability"),
                       parse_number<std::uint64_t>(parts[2], "seed")};
}

std::vector<std::string> preset_names() {
  return {"paper_v", "paper_v_noisy", "quadratic_estimation", "abs_deviation", "consensus",
          "zero"};
}

Preset make_preset(std::string_view name, const DiGraph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  Matrix targets(n, 1);
  for (std::size_t i = 0; i < n; ++i) targets(i, 0) = static_cast<double>(i + 1);

  if (name == "paper_v" || name == "quadratic_estimation") {
    return Preset{quadratic_objective(targets), Matrix(n, 1)};
  }
  if (name == "paper_v_noisy") {
    // Measurements a_i = x* + N_i with N_i ~ N(0, 1).
    constexpr double kTrueParameter = 10.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) targets(i, 0) = kTrueParameter + noise(rng);
    ObjectiveSpec obj = quadratic_objective(targets);
    obj.id = "quadratic_estimation_noisy";
    return Preset{std::move(obj), Matrix(n, 1)};
  }
  if (name == "abs_deviation") {
    return Preset{abs_deviation_objective(targets), Matrix(n, 1)};
  }
  if (name == "consensus" || name == "zero") {
    Matrix x0(n, 1);
    for (std::size_t i = 0; i < n; ++i) x0(i, 0) = static_cast<double>(i);
    return Preset{zero_objective(n), std::move(x0)};
  }
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

void ExperimentConfig::validate() const {
  if (rounds < kMinCheckpoint) {
    throw ConfigError(fmt::format("rounds must be at least {}, got {}", kMinCheckpoint, rounds));
  }
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw ConfigError(fmt::format("safety factor {} outside (0, 1]", safety));
  }
  for (std::size_t c : checkpoints) {
    if (c < kMinCheckpoint || c > rounds) {
      throw ConfigError(
          fmt::format("checkpoint {} outside [{}, {}]", c, kMinCheckpoint, rounds));
    }
  }
  if (graph_file && generator) {
    throw ConfigError("give either a graph file or a generator, not both");
  }
  auto names = preset_names();
  if (std::find(names.begin(), names.end(), preset) == names.end()) {
    throw ConfigError(fmt::format("unknown preset '{}'", preset));
  }
}

std::vector<std::size_t> ExperimentConfig::effective_checkpoints() const {
  if (!checkpoints.empty()) {
    auto sorted = checkpoints;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sorted;
  }
  std::vector<std::size_t> out;
  for (std::size_t c = 10; c <= rounds; c *= 10) out.push_back(c);
  if (out.empty() || out.back() != rounds) out.push_back(rounds);
  return out;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "graph") {
    cfg.graph_file = std::filesystem::path(std::string(value));
  } else if (key == "generate") {
    cfg.generator = parse_generator_spec(value);
  } else if (key == "preset") {
    cfg.preset = std::string(value);
  } else if (key == "rounds") {
    cfg.rounds = parse_number<std::size_t>(value, "round count");
  } else if (key == "schedule") {
    cfg.schedule = StepSchedule::parse(value);
  } else if (key == "safety") {
    cfg.safety = parse_number<double>(value, "safety factor");
  } else if (key == "checkpoints") {
    cfg.checkpoints.clear();
    for (auto part : split(value, ',')) {
      if (!part.empty()) cfg.checkpoints.push_back(parse_number<std::size_t>(part, "checkpoint"));
    }
  } else if (key == "out") {
    cfg.out_dir = std::filesystem::path(std::string(value));
  } else if (key == "verify-bounds") {
    cfg.verify_bounds = parse_bool(value, key);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(value, "seed");
  } else if (key == "trace-stride") {
    cfg.trace_stride = parse_number<std::size_t>(value, "trace stride");
    if (cfg.trace_stride == 0) throw ConfigError("trace stride must be positive");
  } else if (key == "message-log") {
    cfg.message_log = parse_bool(value, key);
  } else if (key == "certificate") {
    cfg.balance_certificate = parse_bool(value, key);
  } else {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
}

void parse_config_into(std::istream& in, ExperimentConfig& cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    try {
      apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("config line {}: {}", line_no, e.what()));
    }
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  parse_config_into(in, cfg);
  return cfg;
}

void write_config_echo(std::ostream& out, const ExperimentConfig& cfg,
                       const ConfigDigest& digest) {
  out << "# config_digest " << digest.to_string() << '\n';
  if (cfg.graph_file) out << "graph = " << cfg.graph_file->string() << '\n';
  if (cfg.generator) {
    out << "generate = " << cfg.generator->n << ',' << format_real(cfg.generator->extra_edge_prob)
        << ',' << cfg.generator->seed << '\n';
  }
  out << "preset = " << cfg.preset << '\n';
  out << "rounds = " << cfg.rounds << '\n';
  out << "schedule = " << cfg.schedule.describe() << '\n';
  out << "safety = " << format_real(cfg.safety) << '\n';
  out << "checkpoints = ";
  auto checkpoints = cfg.effective_checkpoints();
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    out << (k ? "," : "") << checkpoints[k];
  }
  out << '\n';
  out << "verify-bounds = " << (cfg.verify_bounds ? "true" : "false") << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "trace-stride = " << cfg.trace_stride << '\n';
  out << "message-log = " << (cfg.message_log ? "true" : "false") << '\n';
  out << "certificate = " << (cfg.balance_certificate ? "true" : "false") << '\n';
}

namespace {

DiGraph load_graph(const ExperimentConfig& cfg) {
  if (cfg.graph_file) return read_edge_list(*cfg.graph_file);
  if (cfg.generator) {
    return generate_graph(cfg.generator->n, cfg.generator->extra_edge_prob, cfg.generator->seed);
  }
  return paper_v_graph();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  return out;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome outcome;
  auto fail = [&](ExitCode code, std::string message) {
    outcome.code = code;
    outcome.message = std::move(message);
    return outcome;
  };

  std::optional<DiGraph> graph;
  std::optional<Preset> preset;
  try {
    cfg.validate();
    graph.emplace(load_graph(cfg));
    require_strongly_connected(*graph);
    preset.emplace(make_preset(cfg.preset, *graph, cfg.seed));
  } catch (const ConfigError& e) {
    return fail(ExitCode::validation, fmt::format("validation error: {}", e.what()));
  }
  const DiGraph& g = *graph;
  const ObjectiveSpec& obj = preset->objective;

  try {
    std::filesystem::create_directories(cfg.out_dir);
  } catch (const std::exception& e) {
    return fail(ExitCode::io_failure, fmt::format("output error: {}", e.what()));
  }

  std::optional<RunTrace> simulated;
  std::optional<RunTrace> centralized;
  try {
    std::ofstream messages;
    std::optional<MessageLogWriter> log;
    std::function<void(const Broadcast&)> observer;
    if (cfg.message_log) {
      messages = open_output(cfg.out_dir / "messages.csv");
      log.emplace(messages, obj.dimension);
      observer = [&log](const Broadcast& b) { (*log)(b); };
    }
    simulated.emplace(simulate(g, obj, preset->x0, cfg.rounds, cfg.schedule, cfg.safety,
                               std::move(observer)));
    centralized.emplace(run(g, obj, preset->x0, cfg.rounds, cfg.schedule, cfg.safety));
  } catch (const InitializationError& e) {
    return fail(ExitCode::run_failure, fmt::format("initialization error: {}", e.what()));
  } catch (const SubgradientBoundError& e) {
    return fail(ExitCode::run_failure, fmt::format("subgradient bound exceeded: {}", e.what()));
  } catch (const SynchronyError& e) {
    return fail(ExitCode::run_failure, fmt::format("synchrony error: {}", e.what()));
  } catch (const std::ios_base::failure& e) {
    return fail(ExitCode::io_failure, fmt::format("output error: {}", e.what()));
  }

  if (!traces_bit_identical(*simulated, *centralized)) {
    return fail(ExitCode::equivalence_mismatch,
                "equivalence mismatch: message-passing trace differs from centralized run");
  }
  RunTrace& trace = *simulated;
  trace.config.seed = cfg.seed;
  trace.config.objective = obj.id + "/" + cfg.preset;

  const auto checkpoints = cfg.effective_checkpoints();
  DiagnosticsReport report;
  try {
    const PhiSeries phi = phi_series(g, trace, 0, cfg.rounds);
    GeometricFit fit;
    try {
      fit = fit_geometric(phi);
    } catch (const ConvergenceError&) {
      // Products reached the uniform matrix (to rounding) within a few
      // rounds; no decay rate can be fitted.
      fit.C = std::numeric_limits<double>::quiet_NaN();
      fit.lambda = std::numeric_limits<double>::quiet_NaN();
    }
    report = rate_report(trace, obj, fit, checkpoints);
  } catch (const ConfigError& e) {
    return fail(ExitCode::validation, fmt::format("validation error: {}", e.what()));
  }

  try {
    auto edges = open_output(cfg.out_dir / "graph.edges");
    write_edge_list(edges, g);
    auto echo = open_output(cfg.out_dir / "config.echo");
    write_config_echo(echo, cfg, trace.config);
    auto trace_csv = open_output(cfg.out_dir / "trace.csv");
    write_trace_csv(trace_csv, trace, cfg.trace_stride);
    auto report_csv = open_output(cfg.out_dir / "report.csv");
    write_report_csv(report_csv, report, trace.config);
    if (cfg.balance_certificate) {
      auto cert = open_output(cfg.out_dir / "balance.cert");
      BalanceResult balanced =
          run_to_balance(g, WeightVector{std::vector<double>(g.node_count(), 1.0), 0});
      write_balance_certificate(cert, g, balanced.weights);
    }
  } catch (const std::ios_base::failure& e) {
    return fail(ExitCode::io_failure, fmt::format("output error: {}", e.what()));
  } catch (const ConvergenceError& e) {
    return fail(ExitCode::run_failure, fmt::format("balancing error: {}", e.what()));
  }

  outcome.final_ergodic = ergodic_average(trace, cfg.rounds);
  outcome.report = report;
  if (cfg.verify_bounds) {
    if (!(report.fitted_lambda < 1.0)) {
      return fail(ExitCode::bound_violation,
                  fmt::format("bound violation: fitted lambda {} is not below 1",
                              format_real(report.fitted_lambda)));
    }
    for (const CheckpointRow& row : report.checkpoints) {
      if (!row.within_bounds) {
        return fail(ExitCode::bound_violation,
                    fmt::format("bound violation at T={}: ergodic violation {} vs rate bound {}, "
                                "gap {} vs rate bound {} (slack {})",
                                row.T, format_real(row.ergodic_violation),
                                format_real(row.consensus_rate_rhs),
                                format_real(row.optimality_gap),
                                format_real(row.optimality_rate_rhs), format_real(report.slack)));
      }
    }
  }
  outcome.message = "ok";
  return outcome;
}

}  // namespace wbsg
