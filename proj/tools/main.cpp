// zzaloha command-line front end: analytic solves, parameter sweeps,
// Monte Carlo simulation, retransmission-probability optimization and
// drift/stability reports, persisted as JSON or CSV.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zzaloha/zzaloha.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;    // validation / usage errors
constexpr int exit_numeric = 3;  // solver failures

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw zzaloha::InvalidConfigError("cannot open config file " + path);
  json j = json::parse(in);
  if (!j.is_object()) throw zzaloha::InvalidConfigError("config file must hold a JSON object");
  return j;
}

// Flags win over config-file values; config values win over defaults.
template <typename T>
void overlay(const CLI::App& cmd, const json& cfg, const std::string& key, T& value) {
  const CLI::Option* opt = cmd.get_option_no_throw("--" + key);
  if (opt != nullptr && opt->count() > 0) return;
  if (!cfg.contains(key)) return;
  const json& v = cfg.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (v.is_array()) {  // allow ["a","b"] for comma-list options
      std::string joined;
      for (const auto& item : v) {
        if (!joined.empty()) joined += ',';
        joined += item.get<std::string>();
      }
      value = joined;
    } else {
      value = v.get<std::string>();
    }
  } else {
    value = v.get<T>();
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

std::vector<zzaloha::Variant> parse_variants(const std::string& text) {
  std::vector<zzaloha::Variant> variants;
  for (const auto& name : split_list(text)) variants.push_back(zzaloha::parse_variant(name));
  if (variants.empty()) throw zzaloha::InvalidConfigError("empty variant list");
  return variants;
}

std::vector<double> parse_probability_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw zzaloha::InvalidConfigError("cannot parse probability '" + item + "'");
    }
  }
  if (values.empty()) throw zzaloha::InvalidConfigError("empty probability list");
  return values;
}

// Relative output paths land in $ZZALOHA_OUT_DIR when it is set; empty or
// "-" means stdout.
std::filesystem::path resolve_output(const std::string& out) {
  std::filesystem::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("ZZALOHA_OUT_DIR")) path = std::filesystem::path(dir) / path;
  }
  return path;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
    return;
  }
  const std::filesystem::path path = resolve_output(out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + path.string());
  file << content;
  if (!file) throw std::runtime_error("failed writing " + path.string());
}

struct SolveArgs {
  int users = -1;
  double pa = -1, qr = -1;
  std::string variant = "zigzag-paper";
  std::string method = "direct";
  std::string out, matrix_out, config;
};

struct SweepArgs {
  std::string axis;
  double start = -1, stop = -1, step = -1;
  int users = -1;
  double pa = -1, qr = -1;
  std::string variants = "aloha-baseline,zigzag-paper,zigzag-strict";
  std::string out, config;
};

struct SimulateArgs {
  int users = -1;
  double pa = -1, qr = -1;
  std::string variant = "zigzag-strict";
  std::int64_t frames = 100'000;
  std::int64_t warmup = -1;
  std::uint64_t seed = 1;
  int replications = 1;
  std::string accounting = "per-frame";
  bool analytic_compare = false;
  std::string out, config;
};

struct StabilityArgs {
  int users = -1;
  double pa = -1;
  std::string qr;
  std::string variants = "aloha-baseline,zigzag-paper,zigzag-strict";
  std::string out, config;
};

struct OptimizeArgs {
  int users = -1;
  double pa = -1;
  std::string variant = "zigzag-paper";
  double grid_step = 0.01;
  std::string out, config;
};

void require_set(bool ok, const std::string& flag) {
  if (!ok) throw zzaloha::InvalidConfigError("missing required option --" + flag);
}

int run_solve(const CLI::App& cmd, SolveArgs& a) {
  const json cfg = load_config(a.config);
  overlay(cmd, cfg, "users", a.users);
  overlay(cmd, cfg, "pa", a.pa);
  overlay(cmd, cfg, "qr", a.qr);
  overlay(cmd, cfg, "variant", a.variant);
  overlay(cmd, cfg, "method", a.method);
  overlay(cmd, cfg, "out", a.out);
  overlay(cmd, cfg, "matrix-out", a.matrix_out);
  require_set(a.users >= 0, "users");
  require_set(a.pa >= 0, "pa");
  require_set(a.qr >= 0, "qr");
  zzaloha::SolveMethod method;
  if (a.method == "direct")
    method = zzaloha::SolveMethod::Direct;
  else if (a.method == "power" || a.method == "power-iteration")
    method = zzaloha::SolveMethod::PowerIteration;
  else
    throw zzaloha::InvalidConfigError("unknown method '" + a.method +
                                      "' (expected direct or power-iteration)");
  const auto params = zzaloha::validate_params(a.users, a.pa, a.qr, a.variant);
  emit(a.out, zzaloha::solve_report_json(params, method).dump(2) + "\n");
  if (!a.matrix_out.empty()) {
    std::ostringstream csv;
    zzaloha::write_matrix_csv(csv, zzaloha::build_transition_matrix(params));
    emit(a.matrix_out, csv.str());
  }
  return exit_ok;
}

int run_sweep(const CLI::App& cmd, SweepArgs& a) {
  const json cfg = load_config(a.config);
  overlay(cmd, cfg, "axis", a.axis);
  overlay(cmd, cfg, "start", a.start);
  overlay(cmd, cfg, "stop", a.stop);
  overlay(cmd, cfg, "step", a.step);
  overlay(cmd, cfg, "users", a.users);
  overlay(cmd, cfg, "pa", a.pa);
  overlay(cmd, cfg, "qr", a.qr);
  overlay(cmd, cfg, "variants", a.variants);
  overlay(cmd, cfg, "out", a.out);
  require_set(!a.axis.empty(), "axis");
  require_set(a.start >= 0, "start");
  require_set(a.stop >= 0, "stop");
  require_set(a.step >= 0, "step");
  require_set(a.users >= 0, "users");
  zzaloha::SweepSpec spec;
  spec.axis = zzaloha::parse_axis(a.axis);
  spec.start = a.start;
  spec.stop = a.stop;
  spec.step = a.step;
  spec.users = a.users;
  if (spec.axis == zzaloha::SweepAxis::ArrivalProbability) {
    require_set(a.qr >= 0, "qr");
    spec.fixed_probability = a.qr;
  } else {
    require_set(a.pa >= 0, "pa");
    spec.fixed_probability = a.pa;
  }
  spec.variants = parse_variants(a.variants);
  const auto rows = zzaloha::run_sweep(spec);
  emit(a.out, zzaloha::sweep_csv(spec, rows));
  return exit_ok;
}

int run_simulate(const CLI::App& cmd, SimulateArgs& a) {
  const json cfg = load_config(a.config);
  overlay(cmd, cfg, "users", a.users);
  overlay(cmd, cfg, "pa", a.pa);
  overlay(cmd, cfg, "qr", a.qr);
  overlay(cmd, cfg, "variant", a.variant);
  overlay(cmd, cfg, "frames", a.frames);
  overlay(cmd, cfg, "warmup", a.warmup);
  overlay(cmd, cfg, "seed", a.seed);
  overlay(cmd, cfg, "replications", a.replications);
  overlay(cmd, cfg, "accounting", a.accounting);
  overlay(cmd, cfg, "analytic-compare", a.analytic_compare);
  overlay(cmd, cfg, "out", a.out);
  require_set(a.users >= 0, "users");
  require_set(a.pa >= 0, "pa");
  require_set(a.qr >= 0, "qr");
  zzaloha::SimConfig config;
  config.params = zzaloha::validate_params(a.users, a.pa, a.qr, a.variant);
  config.frames = a.frames;
  config.warmup_frames = a.warmup;
  config.seed = a.seed;
  config.replications = a.replications;
  if (a.accounting == "per-frame")
    config.time_accounting = zzaloha::TimeAccounting::PerFrame;
  else if (a.accounting == "per-slot")
    config.time_accounting = zzaloha::TimeAccounting::PerSlot;
  else
    throw zzaloha::InvalidConfigError("unknown accounting '" + a.accounting +
                                      "' (expected per-frame or per-slot)");
  const auto result = zzaloha::simulate(config);
  json report = zzaloha::sim_result_json(config, result);
  if (a.analytic_compare) {
    json compare;
    for (zzaloha::Variant v : {zzaloha::Variant::ZigzagPaper, zzaloha::Variant::ZigzagStrict}) {
      const auto params = zzaloha::validate_params(a.users, a.pa, a.qr, v);
      const auto dist = zzaloha::solve_stationary_direct(zzaloha::build_transition_matrix(params));
      const double analytic_th = zzaloha::throughput(dist, params);
      compare[std::string(zzaloha::variant_name(v))] = {
          {"tv_distance",
           zzaloha::total_variation_distance(result.empirical_occupancy, dist.pi)},
          {"analytic_throughput", analytic_th},
          {"throughput_relative_error",
           std::abs(result.throughput_per_frame_mean - analytic_th) / analytic_th}};
    }
    report["analytic_compare"] = compare;
  }
  emit(a.out, report.dump(2) + "\n");
  return exit_ok;
}

int run_stability(const CLI::App& cmd, StabilityArgs& a) {
  const json cfg = load_config(a.config);
  overlay(cmd, cfg, "users", a.users);
  overlay(cmd, cfg, "pa", a.pa);
  overlay(cmd, cfg, "qr", a.qr);
  overlay(cmd, cfg, "variants", a.variants);
  overlay(cmd, cfg, "out", a.out);
  require_set(a.users >= 0, "users");
  require_set(a.pa >= 0, "pa");
  require_set(!a.qr.empty(), "qr");
  const auto qr_values = parse_probability_list(a.qr);
  const auto variants = parse_variants(a.variants);
  emit(a.out, zzaloha::stability_csv(a.users, a.pa, qr_values, variants));
  return exit_ok;
}

int run_optimize(const CLI::App& cmd, OptimizeArgs& a) {
  const json cfg = load_config(a.config);
  overlay(cmd, cfg, "users", a.users);
  overlay(cmd, cfg, "pa", a.pa);
  overlay(cmd, cfg, "variant", a.variant);
  overlay(cmd, cfg, "grid-step", a.grid_step);
  overlay(cmd, cfg, "out", a.out);
  require_set(a.users >= 0, "users");
  require_set(a.pa >= 0, "pa");
  const zzaloha::Variant variant = zzaloha::parse_variant(a.variant);
  const auto result = zzaloha::maximize_throughput(a.users, a.pa, variant, a.grid_step);
  emit(a.out, zzaloha::optimization_json(a.users, a.pa, variant, a.grid_step, result).dump(2) +
                  "\n");
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted Aloha with two-packet collision resolution: analytic chain "
               "solver, Monte Carlo simulator, sweeps and stability reports"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Solve one parameter point analytically");
  solve->add_option("--users", solve_args.users, "number of users M");
  solve->add_option("--pa", solve_args.pa, "new-packet transmission probability");
  solve->add_option("--qr", solve_args.qr, "retransmission probability");
  solve->add_option("--variant", solve_args.variant,
                    "aloha-baseline | zigzag-paper | zigzag-strict");
  solve->add_option("--method", solve_args.method, "direct | power-iteration");
  solve->add_option("--out", solve_args.out, "output JSON path (default stdout)");
  solve->add_option("--matrix-out", solve_args.matrix_out, "also write transition matrix CSV");
  solve->add_option("--config", solve_args.config, "JSON config file mirroring the flags");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep p_a or q_r and tabulate metrics as CSV");
  sweep->add_option("--axis", sweep_args.axis, "pa | qr");
  sweep->add_option("--start", sweep_args.start, "first axis value");
  sweep->add_option("--stop", sweep_args.stop, "last axis value (inclusive)");
  sweep->add_option("--step", sweep_args.step, "axis increment");
  sweep->add_option("--users", sweep_args.users, "number of users M");
  sweep->add_option("--pa", sweep_args.pa, "fixed p_a (when sweeping qr)");
  sweep->add_option("--qr", sweep_args.qr, "fixed q_r (when sweeping pa)");
  sweep->add_option("--variants", sweep_args.variants, "comma list of variants to compare");
  sweep->add_option("--out", sweep_args.out, "output CSV path (default stdout)");
  sweep->add_option("--config", sweep_args.config, "JSON config file mirroring the flags");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo run of the protocol");
  simulate->add_option("--users", sim_args.users, "number of users M");
  simulate->add_option("--pa", sim_args.pa, "new-packet transmission probability");
  simulate->add_option("--qr", sim_args.qr, "retransmission probability");
  simulate->add_option("--variant", sim_args.variant, "variant echoed into the report");
  simulate->add_option("--frames", sim_args.frames, "frames to simulate");
  simulate->add_option("--warmup", sim_args.warmup,
                       "warmup frames discarded (default: 10% of frames)");
  simulate->add_option("--seed", sim_args.seed, "master RNG seed");
  simulate->add_option("--replications", sim_args.replications, "independent replications");
  simulate->add_option("--accounting", sim_args.accounting, "per-frame | per-slot");
  simulate->add_flag("--analytic-compare", sim_args.analytic_compare,
                     "append distance to the analytic stationary distributions");
  simulate->add_option("--out", sim_args.out, "output JSON path (default stdout)");
  simulate->add_option("--config", sim_args.config, "JSON config file mirroring the flags");

  StabilityArgs stab_args;
  CLI::App* stability = app.add_subcommand("stability", "Drift curves and verdicts as CSV");
  stability->add_option("--users", stab_args.users, "number of users M");
  stability->add_option("--pa", stab_args.pa, "new-packet transmission probability");
  stability->add_option("--qr", stab_args.qr, "comma list of retransmission probabilities");
  stability->add_option("--variants", stab_args.variants, "comma list of variants");
  stability->add_option("--out", stab_args.out, "output CSV path (default stdout)");
  stability->add_option("--config", stab_args.config, "JSON config file mirroring the flags");

  OptimizeArgs opt_args;
  CLI::App* optimize = app.add_subcommand("optimize", "Maximize throughput over q_r");
  optimize->add_option("--users", opt_args.users, "number of users M");
  optimize->add_option("--pa", opt_args.pa, "new-packet transmission probability");
  optimize->add_option("--variant", opt_args.variant, "model variant");
  optimize->add_option("--grid-step", opt_args.grid_step, "grid spacing in [1e-4, 0.1]");
  optimize->add_option("--out", opt_args.out, "output JSON path (default stdout)");
  optimize->add_option("--config", opt_args.config, "JSON config file mirroring the flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (solve->parsed()) return run_solve(*solve, solve_args);
    if (sweep->parsed()) return run_sweep(*sweep, sweep_args);
    if (simulate->parsed()) return run_simulate(*simulate, sim_args);
    if (stability->parsed()) return run_stability(*stability, stab_args);
    if (optimize->parsed()) return run_optimize(*optimize, opt_args);
  } catch (const zzaloha::NotConvergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const zzaloha::SingularSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const zzaloha::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_usage;
}
