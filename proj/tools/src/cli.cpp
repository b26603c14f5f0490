#include "nuqs_cli/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "nuqs/fisher.hpp"
#include "nuqs/medium.hpp"
#include "nuqs/montecarlo.hpp"
#include "nuqs/optimizer.hpp"
#include "nuqs/probe_state.hpp"
#include "nuqs/serialize.hpp"
#include "nuqs/sweep.hpp"
#include "nuqs/version.hpp"

namespace nuqs::cli {

namespace {

using nlohmann::json;

// A config file is one JSON object keyed by long flag names without the
// dashes, e.g. {"n-sat": 10, "bracket": [0.9, 1.1]}. Flags given on the
// command line win.
std::string config_scalar(const std::string& key, const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw Error(ErrorCode::InvalidConfig,
              "config key '" + key + "' must be a string, number, boolean or array");
}

void apply_config(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig,
                "config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = key == "config" ? nullptr : app.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw Error(ErrorCode::InvalidConfig,
                  "unknown config key '" + key + "' for " + app.get_name());
    }
    if (opt->count() > 0) continue;
    std::vector<std::string> inputs;
    if (value.is_array()) {
      for (const auto& v : value) inputs.push_back(config_scalar(key, v));
    } else {
      inputs.push_back(config_scalar(key, value));
    }
    try {
      opt->add_result(inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::InvalidConfig,
                  "config key '" + key + "': " + e.what());
    }
  }
}

struct MediumArgs {
  double T = 1.0;
  double n_sat = 1.0;
  std::string target = "detuning";

  void add(CLI::App& app) {
    app.add_option("--T", T, "On-resonance optical depth")->capture_default_str();
    app.add_option("--n-sat", n_sat, "Saturation photon number")
        ->capture_default_str();
    app.add_option("--target", target, "Parameter of interest: detuning | od")
        ->capture_default_str();
  }

  Medium medium() const { return {.T = T, .n_sat = n_sat}; }
};

struct StateArgs {
  double R = 0.0;
  double theta = 0.0;
  double r = 0.0;
  double psi = 0.0;
  double delta_bar = 0.0;

  void add(CLI::App& app) {
    app.add_option("--R", R, "Coherent amplitude |alpha|")->capture_default_str();
    app.add_option("--theta", theta, "Displacement phase")->capture_default_str();
    app.add_option("--r", r, "Squeezing parameter")->capture_default_str();
    app.add_option("--psi", psi, "Squeezing phase")->capture_default_str();
    app.add_option("--delta-bar", delta_bar, "Detuning in units of gamma_0")
        ->capture_default_str();
  }

  ProbeState state() const {
    return {.R = R, .theta = theta, .r = r, .psi = psi};
  }
};

struct SearchArgs {
  OptimizerConfig config;

  void add(CLI::App& app) {
    app.add_option("--nbar-max", config.bounds.nbar_max, "Photon-number bound")
        ->capture_default_str();
    app.add_option("--r-max", config.bounds.r_max, "Squeezing bound")
        ->capture_default_str();
    app.add_option("--delta-max", config.bounds.delta_max, "Detuning bound")
        ->capture_default_str();
    app.add_option("--starts", config.quasi_random_starts,
                   "Quasi-random starts per search")
        ->capture_default_str();
    app.add_option("--iterations-per-dim", config.iterations_per_dim)
        ->capture_default_str();
    app.add_option("--diameter-tol", config.diameter_tol)->capture_default_str();
  }
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void write_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  file << j.dump(2) << '\n';
  if (!file) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

bool is_usage_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteField:
    case ErrorCode::NegativeMagnitude:
    case ErrorCode::InvalidMedium:
    case ErrorCode::NegativePhotonNumber:
    case ErrorCode::InvalidGrid:
    case ErrorCode::InvalidConfig:
      return true;
    default:
      return false;
  }
}

// ---- eval -----------------------------------------------------------------

struct EvalCommand {
  MediumArgs medium;
  StateArgs state;

  int operator()(std::ostream& out, std::ostream&) const {
    const Target target = parse_target(medium.target);
    const ProbeState s = validate_state(state.state());
    const ModelPoint p = evaluate_model(s, medium.medium(), state.delta_bar);
    const FisherBreakdown f =
        fisher_information(s, medium.medium(), state.delta_bar, target);
    const json j = {{"mu", p.output.mu},
                    {"v", p.output.v},
                    {"phi", p.response.phi},
                    {"xi", p.response.xi},
                    {"gamma_bar", p.response.gamma_bar},
                    {"nbar", p.nbar},
                    {"target", to_string(target)},
                    {"fisher", f}};
    out << j.dump(2) << '\n';
    return kOk;
  }
};

// ---- optimize -------------------------------------------------------------

struct OptimizeCommand {
  MediumArgs medium;
  SearchArgs search;
  std::string family = "both";
  std::string json_out;
  int threads = 0;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Target target = parse_target(medium.target);
    const Medium m = medium.medium();
    validate_medium(m);
    OptimizerConfig config = search.config;
    config.threads = resolve_threads(threads);
    std::ostream& summary = json_out.empty() ? err : out;

    if (family == "both") {
      AdvantageResult result;
      std::optional<Error> failure;
      try {
        result = quantum_advantage(m, target, config);
      } catch (const AdvantageError& e) {
        result = e.payload();
        failure.emplace(e.code(), e.what());
      }
      write_json(json(result), json_out, out);
      summary << "I_sq = " << result.i_sq << "  I_coh = " << result.i_coh
              << "  A = " << result.advantage << "  regime "
              << to_string(result.sq_result.regime) << '\n';
      return finish(failure, err);
    }

    const StateFamily fam = parse_family(family);
    OptimizationResult result;
    std::optional<Error> failure;
    try {
      result = optimize(m, target, fam, config);
    } catch (const OptimizationError& e) {
      result = e.payload();
      failure.emplace(e.code(), e.what());
    }
    write_json(json(result), json_out, out);
    summary << to_string(fam) << " optimum I = " << result.value
            << "  nbar = " << result.nbar << "  delta_bar = " << result.delta_bar
            << "  regime " << to_string(result.regime) << '\n';
    return finish(failure, err);
  }

  static int finish(const std::optional<Error>& failure, std::ostream& err) {
    if (!failure) return kOk;
    err << "error: " << failure->what() << '\n';
    return failure->code() == ErrorCode::BoundaryOptimum ? kBoundary : kRuntime;
  }
};

// ---- sweep ----------------------------------------------------------------

struct SweepCommand {
  std::string grid_file;
  GridSpec grid;
  std::string target = "detuning";
  SearchArgs search;
  std::string out_path;
  std::string format = "csv";
  int threads = 0;
  bool no_warm_start = false;

  CLI::Option* target_opt = nullptr;
  std::vector<std::pair<CLI::Option*, double*>> axis_doubles;
  std::vector<std::pair<CLI::Option*, int*>> axis_counts;

  void add(CLI::App& app) {
    app.add_option("--grid", grid_file, "JSON grid file {n_sat, T, target}")
        ->check(CLI::ExistingFile);
    auto axis = [&](const std::string& name, AxisSpec& a) {
      axis_doubles.emplace_back(
          app.add_option("--" + name + "-min", a.min)->capture_default_str(),
          &a.min);
      axis_doubles.emplace_back(
          app.add_option("--" + name + "-max", a.max)->capture_default_str(),
          &a.max);
      axis_counts.emplace_back(
          app.add_option("--" + name + "-points", a.points)->capture_default_str(),
          &a.points);
    };
    axis("n-sat", grid.n_sat);
    axis("T", grid.T);
    target_opt = app.add_option("--target", target, "detuning | od")
                     ->capture_default_str();
    search.add(app);
    app.add_option("--out", out_path, "Output file (default: standard output)");
    app.add_option("--format", format, "csv | json")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0: all cores)")
        ->capture_default_str();
    app.add_flag("--no-warm-start", no_warm_start,
                 "Do not seed cells from their neighbours");
  }

  // Flags given explicitly (or through --config) win over the grid file.
  GridSpec resolve_grid() const {
    GridSpec g = grid;
    g.target = parse_target(target);
    if (!grid_file.empty()) {
      GridSpec file;
      try {
        std::ifstream in(grid_file);
        file = json::parse(in).get<GridSpec>();
      } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidGrid,
                    "bad grid file '" + grid_file + "': " + e.what());
      }
      const std::vector<double*> file_doubles = {&file.n_sat.min, &file.n_sat.max,
                                                 &file.T.min, &file.T.max};
      const std::vector<int*> file_counts = {&file.n_sat.points, &file.T.points};
      for (std::size_t k = 0; k < axis_doubles.size(); ++k) {
        if (axis_doubles[k].first->count() > 0) *file_doubles[k] = *axis_doubles[k].second;
      }
      for (std::size_t k = 0; k < axis_counts.size(); ++k) {
        if (axis_counts[k].first->count() > 0) *file_counts[k] = *axis_counts[k].second;
      }
      if (target_opt->count() > 0) file.target = g.target;
      g = file;
    }
    validate_grid(g);
    return g;
  }

  int operator()(std::ostream& out, std::ostream& err) const {
    const GridSpec g = resolve_grid();
    const TableFormat fmt = parse_table_format(format);
    SweepOptions options;
    options.optimizer = search.config;
    options.threads = resolve_threads(threads);
    options.warm_start = !no_warm_start;

    const SweepTable table = run_sweep(g, options);
    if (out_path.empty() || out_path == "-") {
      write_table(table, fmt, out);
    } else {
      write_table(table, fmt, std::filesystem::path(out_path));
    }
    err << table.cells.size() << " cells, " << table.flagged_cells()
        << " flagged\n";
    return kOk;
  }
};

// ---- simulate -------------------------------------------------------------

struct SimulateCommand {
  MediumArgs medium;
  StateArgs state;
  std::size_t samples = 100;
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  std::vector<double> bracket;
  std::optional<double> true_value;
  std::string hook;
  std::string at_optimum;
  std::string json_out;
  int threads = 0;

  void add(CLI::App& app) {
    medium.add(app);
    state.add(app);
    app.add_option("--samples", samples, "Outcomes per experiment")
        ->capture_default_str();
    app.add_option("--reps", reps, "Simulated experiments")->capture_default_str();
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_option("--bracket", bracket, "MLE search interval LO HI")
        ->expected(2);
    app.add_option("--true-value", true_value,
                   "True parameter (default: --delta-bar or --T)");
    app.add_option("--hook", hook,
                   "Replace the model by a test family: normal-location | "
                   "normal-log-variance");
    app.add_option("--at-optimum", at_optimum,
                   "Probe at the optimum of a family: coherent | gaussian");
    app.add_option("--json-out", json_out, "Report file (default: standard output)");
    app.add_option("--threads", threads, "Worker threads (0: all cores)")
        ->capture_default_str();
  }

  int operator()(std::ostream& out, std::ostream& err) const {
    const Target target = parse_target(medium.target);
    SimConfig sim;
    sim.n_samples = samples;
    sim.n_repetitions = reps;
    sim.seed = seed;
    sim.target = target;
    sim.true_value = true_value;
    sim.threads = resolve_threads(threads);
    if (bracket.size() == 2) {
      sim.bracket_lo = bracket[0];
      sim.bracket_hi = bracket[1];
    }

    GaussianFamily family;
    double y_true = 0.0;
    json probe;
    if (!hook.empty()) {
      if (hook == "normal-location") {
        family = normal_location_family();
      } else if (hook == "normal-log-variance") {
        family = normal_log_variance_family();
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown hook '" + hook + "'");
      }
      y_true = true_value.value_or(0.0);
      probe = {{"hook", hook}};
    } else {
      const Medium m = medium.medium();
      validate_medium(m);
      ProbeState s = validate_state(state.state());
      double delta_bar = state.delta_bar;
      if (!at_optimum.empty()) {
        OptimizerConfig config;
        config.threads = sim.threads;
        OptimizationResult opt;
        try {
          opt = optimize(m, target, parse_family(at_optimum), config);
        } catch (const OptimizationError& e) {
          err << "warning: " << e.what() << "; using the best point found\n";
          opt = e.payload();
        }
        s = opt.state;
        delta_bar = opt.delta_bar;
      }
      family = transmission_family(s, m, delta_bar, target);
      y_true = true_value.value_or(target == Target::Detuning ? delta_bar : m.T);
      probe = {{"medium", m}, {"state", s}, {"delta_bar", delta_bar}};
    }

    const EstimatorReport report = crb_check(family, y_true, sim);
    json j = report;
    j["target"] = to_string(target);
    j["probe"] = probe;
    write_json(j, json_out, out);
    if (!json_out.empty()) {
      out << "I = " << report.analytic_fisher << "  empirical "
          << report.empirical.value << " +- " << report.empirical.standard_error
          << "  crb_ratio " << report.crb_ratio << " +- " << report.crb_ratio_se
          << '\n';
    }
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Fisher information and quantum advantage of Gaussian probes "
               "in a saturable absorber. Detunings are in units of the "
               "unbroadened linewidth gamma_0."};
  app.name(args.empty() ? "nuqs" : args.front());
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::map<CLI::App*, std::string> config_paths;
  auto config_for = [&](CLI::App* sub) {
    sub->add_option("--config", config_paths[sub], "JSON file with flag values")
        ->check(CLI::ExistingFile);
  };

  EvalCommand eval;
  CLI::App* eval_app = app.add_subcommand(
      "eval", "Output statistics and Fisher information of one probe");
  eval.medium.add(*eval_app);
  eval.state.add(*eval_app);
  config_for(eval_app);

  OptimizeCommand optimize_cmd;
  CLI::App* opt_app = app.add_subcommand(
      "optimize", "Number-optimised Fisher information and quantum advantage");
  optimize_cmd.medium.add(*opt_app);
  optimize_cmd.search.add(*opt_app);
  opt_app->add_option("--family", optimize_cmd.family,
                      "coherent | gaussian | both (advantage)")
      ->capture_default_str();
  opt_app->add_option("--json-out", optimize_cmd.json_out, "Result file");
  opt_app->add_option("--threads", optimize_cmd.threads,
                      "Worker threads (0: all cores)")
      ->capture_default_str();
  config_for(opt_app);

  SweepCommand sweep;
  CLI::App* sweep_app =
      app.add_subcommand("sweep", "Advantage map over a log-spaced (n_sat, T) grid");
  sweep.add(*sweep_app);
  config_for(sweep_app);

  SimulateCommand simulate;
  CLI::App* sim_app = app.add_subcommand(
      "simulate", "Monte Carlo Fisher information and Cramer-Rao check");
  simulate.add(*sim_app);
  config_for(sim_app);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("nuqs");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (auto& [sub, path] : config_paths) {
      if (sub->parsed() && !path.empty()) apply_config(*sub, path);
    }
    if (eval_app->parsed()) return eval(out, err);
    if (opt_app->parsed()) return optimize_cmd(out, err);
    if (sweep_app->parsed()) return sweep(out, err);
    if (sim_app->parsed()) return simulate(out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kUsage : kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace nuqs::cli
