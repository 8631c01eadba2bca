#pragma once

#include <optional>
#include <vector>

#include "zzaloha/stationary.hpp"

namespace zzaloha {

/// Mean backlog sum_N N pi_N.
template <typename Derived>
typename Derived::Scalar avg_backlog(const Eigen::MatrixBase<Derived>& pi) {
  using Scalar = typename Derived::Scalar;
  Scalar total(0);
  for (Eigen::Index n = 0; n < pi.size(); ++n) total += Scalar(n) * pi(n);
  return total;
}

/// Total throughput in packets per frame: p_a (M - S_B).
template <typename Scalar>
Scalar throughput(const StationaryDistribution<Scalar>& dist, const ModelParams<Scalar>& params) {
  return params.p_a * (Scalar(params.users) - avg_backlog(dist.pi));
}

/// Mean packet delay in frames via Little's law: 1 + S_B / Th.
template <typename Scalar>
Scalar delay(Scalar throughput_per_frame, Scalar backlog) {
  if (!(throughput_per_frame > Scalar(0)))
    throw UndefinedDelayError("delay undefined for zero throughput");
  return Scalar(1) + backlog / throughput_per_frame;
}

/// New-packet throughput in its printed form
/// sum_N pi_N [Qa(1,N) + Qa(2,N) Qr(0,N)].
template <typename Scalar>
Scalar throughput_new(const StationaryDistribution<Scalar>& dist,
                      const ModelParams<Scalar>& params) {
  Scalar total(0);
  for (int n = 0; n < dist.pi.size(); ++n)
    total += dist.pi(n) *
             (detail::qa(1, n, params) + detail::qa(2, n, params) * detail::qr(0, n, params));
  return total;
}

/// Event-consistent alternative: a lone new packet survives only when at most
/// one backlogged node retransmits, and a new-packet pair that meets silence
/// delivers two packets.
template <typename Scalar>
Scalar throughput_new_consistent(const StationaryDistribution<Scalar>& dist,
                                 const ModelParams<Scalar>& params) {
  Scalar total(0);
  for (int n = 0; n < dist.pi.size(); ++n) {
    const Scalar qa1 = detail::qa(1, n, params);
    const Scalar qa2 = detail::qa(2, n, params);
    const Scalar qr0 = detail::qr(0, n, params);
    const Scalar qr1 = detail::qr(1, n, params);
    total += dist.pi(n) * (qa1 * (qr0 + qr1) + Scalar(2) * qa2 * qr0);
  }
  return total;
}

template <typename Scalar = double>
struct MetricsReport {
  ModelParams<Scalar> params;
  Scalar throughput_total = Scalar(0);             // Th, packets per frame
  Scalar avg_backlog = Scalar(0);                  // S_B, packets
  std::optional<Scalar> delay_total;               // D, frames
  Scalar throughput_new = Scalar(0);               // T, printed form
  Scalar throughput_new_consistent = Scalar(0);    // diagnostic alternative
  Scalar throughput_backlogged = Scalar(0);        // Th - T; can round negative
  std::optional<Scalar> delay_backlogged;          // undefined when Th - T <= 0
};

template <typename Scalar>
MetricsReport<Scalar> compute_metrics(const StationaryDistribution<Scalar>& dist,
                                      const ModelParams<Scalar>& params) {
  MetricsReport<Scalar> report;
  report.params = params;
  report.avg_backlog = avg_backlog(dist.pi);
  report.throughput_total = params.p_a * (Scalar(params.users) - report.avg_backlog);
  if (report.throughput_total > Scalar(0))
    report.delay_total = delay(report.throughput_total, report.avg_backlog);
  report.throughput_new = throughput_new(dist, params);
  report.throughput_new_consistent = throughput_new_consistent(dist, params);
  report.throughput_backlogged = report.throughput_total - report.throughput_new;
  if (report.throughput_backlogged > Scalar(0))
    report.delay_backlogged = delay(report.throughput_backlogged, report.avg_backlog);
  return report;
}

enum class EquilibriumKind { Stable, Unstable };

template <typename Scalar = double>
struct Equilibrium {
  Scalar location;  // fractional state where the drift crosses zero
  EquilibriumKind kind;
};

/// Expected backlog drift per state and the zero crossings that act as
/// operating points. A positive-to-negative crossing attracts the backlog
/// (stable), the reverse repels it.
template <typename Scalar = double>
struct DriftCurve {
  Vector<Scalar> drift;  // D_N = (M - N) p_a - P_succ(N)
  Vector<Scalar> psucc;
  std::vector<Equilibrium<Scalar>> equilibria;
};

/// Success probability at backlog N. The resolution-capable variants count a
/// frame successful when one or two transmissions appear with the opposite
/// population silent; the baseline needs exactly one transmission overall.
template <typename Scalar>
Scalar success_probability(int backlog, const ModelParams<Scalar>& params) {
  detail::check_backlog_state(backlog, params);
  const Scalar qa0 = detail::qa(0, backlog, params);
  const Scalar qa1 = detail::qa(1, backlog, params);
  const Scalar qr0 = detail::qr(0, backlog, params);
  const Scalar qr1 = detail::qr(1, backlog, params);
  if (params.variant == Variant::AlohaBaseline) return qa1 * qr0 + qr1 * qa0;
  const Scalar qa2 = detail::qa(2, backlog, params);
  const Scalar qr2 = detail::qr(2, backlog, params);
  return (qa1 + qa2) * qr0 + (qr1 + qr2) * qa0;
}

namespace detail {

// Sign sequence with zeros resolved: an interior zero inherits the sign to
// its left, a zero at N = 0 counts as nonnegative (the drift at an empty
// backlog can never be negative, so a flat start is the top of a descent).
template <typename Scalar>
std::vector<int> resolved_drift_signs(const Vector<Scalar>& drift) {
  std::vector<int> signs(drift.size());
  for (Eigen::Index n = 0; n < drift.size(); ++n) {
    if (drift(n) > Scalar(0))
      signs[n] = 1;
    else if (drift(n) < Scalar(0))
      signs[n] = -1;
    else
      signs[n] = n == 0 ? 1 : signs[n - 1];
  }
  return signs;
}

}  // namespace detail

template <typename Scalar>
std::vector<Equilibrium<Scalar>> find_equilibria(const Vector<Scalar>& drift) {
  const std::vector<int> signs = detail::resolved_drift_signs(drift);
  std::vector<Equilibrium<Scalar>> points;
  for (Eigen::Index n = 0; n + 1 < drift.size(); ++n) {
    if (signs[n] == signs[n + 1]) continue;
    const Scalar d0 = drift(n);
    const Scalar d1 = drift(n + 1);
    const Scalar location = Scalar(n) + d0 / (d0 - d1);
    points.push_back({location, signs[n] > 0 ? EquilibriumKind::Stable
                                             : EquilibriumKind::Unstable});
  }
  return points;
}

template <typename Scalar>
DriftCurve<Scalar> drift_curve(const ModelParams<Scalar>& params) {
  const int states = params.states();
  DriftCurve<Scalar> curve;
  curve.drift.resize(states);
  curve.psucc.resize(states);
  for (int n = 0; n < states; ++n) {
    curve.psucc(n) = success_probability(n, params);
    curve.drift(n) = Scalar(params.users - n) * params.p_a - curve.psucc(n);
  }
  curve.equilibria = find_equilibria(curve.drift);
  return curve;
}

enum class StabilityVerdict { Monostable, Bistable, Degenerate };

inline std::string_view verdict_name(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Monostable:
      return "monostable";
    case StabilityVerdict::Bistable:
      return "bistable";
    case StabilityVerdict::Degenerate:
      return "degenerate";
  }
  return "degenerate";
}

/// Bistable when the drift has two or more stable operating points,
/// monostable with exactly one, degenerate when none exists.
template <typename Scalar>
StabilityVerdict classify_stability(const DriftCurve<Scalar>& curve) {
  int stable = 0;
  for (const auto& e : curve.equilibria)
    if (e.kind == EquilibriumKind::Stable) ++stable;
  if (stable >= 2) return StabilityVerdict::Bistable;
  if (stable == 1) return StabilityVerdict::Monostable;
  return StabilityVerdict::Degenerate;
}

}  // namespace zzaloha
