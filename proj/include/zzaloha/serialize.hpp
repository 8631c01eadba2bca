#pragma once

#include <charconv>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zzaloha/chain.hpp"
#include "zzaloha/metrics.hpp"
#include "zzaloha/optimize.hpp"
#include "zzaloha/simulate.hpp"
#include "zzaloha/stationary.hpp"
#include "zzaloha/sweep.hpp"

namespace zzaloha {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

inline nlohmann::json params_json(const ModelParams<double>& params) {
  return {{"users", params.users},
          {"pa", params.p_a},
          {"qr", params.q_r},
          {"variant", std::string(variant_name(params.variant))}};
}

inline nlohmann::json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline nlohmann::json stationary_json(const StationaryDistribution<double>& dist) {
  return {{"pi", vector_json(dist.pi)},
          {"residual", dist.residual},
          {"method", std::string(method_name(dist.method))},
          {"iterations", dist.iterations}};
}

inline nlohmann::json metrics_json(const MetricsReport<double>& report) {
  nlohmann::json j = {{"throughput", report.throughput_total},
                      {"avg_backlog", report.avg_backlog},
                      {"throughput_new", report.throughput_new},
                      {"throughput_new_consistent", report.throughput_new_consistent},
                      {"throughput_backlogged", report.throughput_backlogged}};
  j["delay"] = report.delay_total ? nlohmann::json(*report.delay_total) : nlohmann::json();
  j["delay_backlogged"] =
      report.delay_backlogged ? nlohmann::json(*report.delay_backlogged) : nlohmann::json();
  return j;
}

inline nlohmann::json drift_json(const DriftCurve<double>& curve) {
  nlohmann::json equilibria = nlohmann::json::array();
  for (const auto& e : curve.equilibria)
    equilibria.push_back(
        {{"location", e.location},
         {"kind", e.kind == EquilibriumKind::Stable ? "stable" : "unstable"}});
  return {{"values", vector_json(curve.drift)},
          {"psucc", vector_json(curve.psucc)},
          {"equilibria", equilibria}};
}

/// Full analytic report for one parameter point: stationary distribution,
/// metrics, drift curve with classified operating points, and the
/// matrix-exact drift for cross-checking.
inline nlohmann::json solve_report_json(const ModelParams<double>& params,
                                        SolveMethod method = SolveMethod::Direct) {
  const auto chain = build_transition_matrix(params);
  const auto dist = solve_stationary(chain, method);
  const auto curve = drift_curve(params);
  nlohmann::json j;
  j["params"] = params_json(params);
  j["stationary"] = stationary_json(dist);
  j["metrics"] = metrics_json(compute_metrics(dist, params));
  j["drift"] = drift_json(curve);
  j["drift"]["chain_exact"] = vector_json(chain_exact_drift(chain));
  j["stability"] = std::string(verdict_name(classify_stability(curve)));
  return j;
}

inline nlohmann::json replication_json(const ReplicationStats& rep) {
  return {{"stream_seed", rep.stream_seed},
          {"measured_frames", rep.measured_frames},
          {"measured_slots", rep.measured_slots},
          {"delivered", rep.delivered},
          {"delivered_first_try", rep.delivered_first_try},
          {"arrivals", rep.arrivals},
          {"throughput_per_frame", rep.throughput_per_frame},
          {"throughput_per_slot", rep.throughput_per_slot},
          {"new_packet_throughput_per_frame", rep.new_packet_throughput_per_frame},
          {"mean_delay_slots", rep.mean_delay_slots},
          {"mean_delay_frames", rep.mean_delay_frames},
          {"mean_backlog", rep.mean_backlog}};
}

inline nlohmann::json sim_result_json(const SimConfig& config, const SimResult& result) {
  nlohmann::json j;
  j["config"] = {{"users", config.params.users},
                 {"pa", config.params.p_a},
                 {"qr", config.params.q_r},
                 {"variant", std::string(variant_name(config.params.variant))},
                 {"frames", config.frames},
                 {"warmup_frames", config.effective_warmup()},
                 {"seed", config.seed},
                 {"replications", config.replications},
                 {"time_accounting", std::string(accounting_name(config.time_accounting))}};
  nlohmann::json r;
  r["empirical_occupancy"] = vector_json(result.empirical_occupancy);
  r["throughput_mean"] = result.throughput_mean;
  r["throughput_stderr"] = result.throughput_stderr;
  r["new_packet_throughput_mean"] = result.new_packet_throughput_mean;
  r["new_packet_throughput_stderr"] = result.new_packet_throughput_stderr;
  r["mean_delay"] = result.mean_delay;
  r["delay_stderr"] = result.delay_stderr;
  r["mean_delay_frames"] = result.mean_delay_frames;
  r["mean_delay_frames_stderr"] = result.mean_delay_frames_stderr;
  r["mean_backlog"] = result.mean_backlog;
  r["mean_backlog_stderr"] = result.mean_backlog_stderr;
  r["frames_by_outcome"] = {
      {"idle", result.frames_by_outcome[0]},
      {"success", result.frames_by_outcome[1]},
      {"zigzag", result.frames_by_outcome[2]},
      {"collision", result.frames_by_outcome[3]}};
  r["seed"] = result.seed;
  r["measured_frames"] = result.measured_frames;
  r["measured_slots"] = result.measured_slots;
  r["packets_delivered"] = result.packets_delivered;
  r["throughput_per_frame_mean"] = result.throughput_per_frame_mean;
  r["throughput_per_frame_stderr"] = result.throughput_per_frame_stderr;
  r["throughput_per_slot_mean"] = result.throughput_per_slot_mean;
  r["throughput_per_slot_stderr"] = result.throughput_per_slot_stderr;
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& rep : result.replications) reps.push_back(replication_json(rep));
  r["replications"] = reps;
  j["result"] = r;
  return j;
}

inline nlohmann::json optimization_json(int users, double p_a, Variant variant,
                                        double grid_step,
                                        const OptimizationResult<double>& result) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [q, th] : result.trace) trace.push_back({q, th});
  return {{"users", users},
          {"pa", p_a},
          {"variant", std::string(variant_name(variant))},
          {"grid_step", grid_step},
          {"qr_star", result.qr_star},
          {"th_star", result.th_star},
          {"trace", trace}};
}

/// One matrix row per line, entries comma-separated at full precision.
inline void write_matrix_csv(std::ostream& out, const TransitionMatrix<double>& chain) {
  for (int n = 0; n < chain.states(); ++n) {
    for (int n2 = 0; n2 < chain.states(); ++n2) {
      if (n2) out << ',';
      out << format_double(chain.probs(n, n2));
    }
    out << '\n';
  }
}

inline std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "# zzaloha sweep\n";
  out << "# axis=" << axis_name(spec.axis) << " start=" << format_double(spec.start)
      << " stop=" << format_double(spec.stop) << " step=" << format_double(spec.step) << "\n";
  out << "# users=" << spec.users << " fixed-"
      << (spec.axis == SweepAxis::ArrivalProbability ? "qr" : "pa") << "="
      << format_double(spec.fixed_probability) << "\n";
  out << "variant,axis_value,throughput,avg_backlog,delay,throughput_new,"
         "throughput_backlogged,delay_backlogged\n";
  for (const auto& row : rows) {
    out << variant_name(row.variant) << ',' << format_double(row.axis_value) << ','
        << format_double(row.metrics.throughput_total) << ','
        << format_double(row.metrics.avg_backlog) << ','
        << (row.metrics.delay_total ? format_double(*row.metrics.delay_total) : "") << ','
        << format_double(row.metrics.throughput_new) << ','
        << format_double(row.metrics.throughput_backlogged) << ','
        << (row.metrics.delay_backlogged ? format_double(*row.metrics.delay_backlogged) : "")
        << '\n';
  }
  return out.str();
}

/// Drift table for each (variant, q_r) pair followed by a comment block with
/// the located equilibria and the stability verdict.
inline std::string stability_csv(int users, double p_a, const std::vector<double>& qr_values,
                                 const std::vector<Variant>& variants) {
  std::ostringstream out;
  out << "# zzaloha stability\n";
  out << "# users=" << users << " pa=" << format_double(p_a) << "\n";
  out << "variant,qr,N,drift,psucc,arrival_rate\n";
  std::ostringstream summary;
  for (Variant variant : variants) {
    for (double qr : qr_values) {
      const auto params = validate_params(users, p_a, qr, variant);
      const auto curve = drift_curve(params);
      for (int n = 0; n <= users; ++n)
        out << variant_name(variant) << ',' << format_double(qr) << ',' << n << ','
            << format_double(curve.drift(n)) << ',' << format_double(curve.psucc(n)) << ','
            << format_double((users - n) * p_a) << '\n';
      summary << "# equilibria variant=" << variant_name(variant)
              << " qr=" << format_double(qr) << ":";
      for (const auto& e : curve.equilibria)
        summary << ' ' << (e.kind == EquilibriumKind::Stable ? "stable@" : "unstable@")
                << format_double(e.location);
      if (curve.equilibria.empty()) summary << " none";
      summary << " verdict=" << verdict_name(classify_stability(curve)) << "\n";
    }
  }
  out << summary.str();
  return out.str();
}

}  // namespace zzaloha
