#pragma once

#include <cmath>
#include <string_view>
#include <vector>

#include "zzaloha/metrics.hpp"

namespace zzaloha {

enum class SweepAxis { ArrivalProbability, RetransmissionProbability };

inline std::string_view axis_name(SweepAxis a) {
  return a == SweepAxis::ArrivalProbability ? "pa" : "qr";
}

inline SweepAxis parse_axis(std::string_view name) {
  if (name == "pa") return SweepAxis::ArrivalProbability;
  if (name == "qr") return SweepAxis::RetransmissionProbability;
  throw InvalidConfigError("unknown sweep axis '" + std::string(name) + "' (expected pa or qr)");
}

/// One-dimensional metrics sweep over p_a or q_r, at fixed everything else,
/// evaluated for each requested variant.
struct SweepSpec {
  SweepAxis axis = SweepAxis::ArrivalProbability;
  double start = 0;
  double stop = 0;
  double step = 0;
  int users = 0;
  double fixed_probability = 0;  // q_r when sweeping p_a, p_a when sweeping q_r
  std::vector<Variant> variants;
};

inline constexpr double max_sweep_points = 1e5;

inline void validate_sweep(const SweepSpec& spec) {
  if (!(spec.start > 0 && spec.start <= spec.stop && spec.stop < 1))
    throw InvalidConfigError("sweep range must satisfy 0 < start <= stop < 1");
  if (!(spec.step > 0)) throw InvalidConfigError("sweep step must be positive");
  if ((spec.stop - spec.start) / spec.step > max_sweep_points)
    throw InvalidConfigError("sweep exceeds the 1e5-point limit");
  if (spec.variants.empty()) throw InvalidConfigError("sweep needs at least one variant");
  // validates users and the fixed probability up front
  validate_params(spec.users, spec.axis == SweepAxis::ArrivalProbability ? spec.start
                                                                         : spec.fixed_probability,
                  spec.axis == SweepAxis::ArrivalProbability ? spec.fixed_probability
                                                             : spec.start,
                  spec.variants.front());
}

inline std::vector<double> sweep_axis_values(const SweepSpec& spec) {
  const int count = static_cast<int>(std::floor((spec.stop - spec.start) / spec.step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (int k = 0; k < count; ++k) values.push_back(spec.start + k * spec.step);
  return values;
}

struct SweepRow {
  Variant variant;
  double axis_value = 0;
  MetricsReport<double> metrics;
};

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  const std::vector<double> values = sweep_axis_values(spec);
  std::vector<SweepRow> rows;
  rows.reserve(spec.variants.size() * values.size());
  for (Variant variant : spec.variants) {
    for (double value : values) {
      const bool sweeping_pa = spec.axis == SweepAxis::ArrivalProbability;
      const auto params = validate_params(spec.users,
                                          sweeping_pa ? value : spec.fixed_probability,
                                          sweeping_pa ? spec.fixed_probability : value, variant);
      const auto dist = solve_stationary_direct(build_transition_matrix(params));
      rows.push_back({variant, value, compute_metrics(dist, params)});
    }
  }
  return rows;
}

}  // namespace zzaloha
