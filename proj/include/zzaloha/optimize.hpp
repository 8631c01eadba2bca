#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "zzaloha/metrics.hpp"

namespace zzaloha {

template <typename Scalar = double>
struct OptimizationResult {
  Scalar qr_star = Scalar(0);
  Scalar th_star = Scalar(0);
  std::vector<std::pair<Scalar, Scalar>> trace;  // grid evaluations (q_r, Th)
};

/// Stationary throughput of the model at one retransmission probability.
template <typename Scalar>
Scalar throughput_at(int users, Scalar p_a, Scalar q_r, Variant variant) {
  const auto params = validate_params(users, p_a, q_r, variant);
  const auto dist = solve_stationary_direct(build_transition_matrix(params));
  return throughput(dist, params);
}

/// Maximize throughput over q_r: a coarse grid scan locates the best basin
/// (the curve is smooth but not proven unimodal), then golden-section search
/// shrinks the bracket around the best grid point to width 1e-6. Grid ties
/// break toward the smallest q_r; the reported optimum is the best point
/// evaluated anywhere.
template <typename Scalar>
OptimizationResult<Scalar> maximize_throughput(int users, Scalar p_a, Variant variant,
                                               Scalar grid_step = Scalar(0.01)) {
  if (!(grid_step >= Scalar(1e-4) && grid_step <= Scalar(0.1)))
    throw OutOfRangeError("grid_step must lie in [1e-4, 0.1]");

  OptimizationResult<Scalar> result;
  const int points =
      static_cast<int>(std::floor((Scalar(1) - 2 * grid_step) / grid_step + Scalar(1e-9))) + 1;
  result.trace.reserve(points);
  Scalar best_q = Scalar(0);
  Scalar best_th = Scalar(0);
  for (int k = 1; k <= points; ++k) {
    const Scalar q = Scalar(k) * grid_step;
    const Scalar th = throughput_at(users, p_a, q, variant);
    result.trace.emplace_back(q, th);
    if (k == 1 || th > best_th) {  // ascending scan: ties keep the smaller q_r
      best_q = q;
      best_th = th;
    }
  }

  // Refinement evaluations replace the incumbent only on strict improvement,
  // so a flat objective keeps the grid tie-break.
  auto evaluate = [&](Scalar q) {
    const Scalar th = throughput_at(users, p_a, q, variant);
    if (th > best_th) {
      best_q = q;
      best_th = th;
    }
    return th;
  };

  Scalar lo = std::max(best_q - grid_step, Scalar(0));
  Scalar hi = std::min(best_q + grid_step, Scalar(1));
  const Scalar invphi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = hi - invphi * (hi - lo);
  Scalar d = lo + invphi * (hi - lo);
  Scalar fc = evaluate(c);
  Scalar fd = evaluate(d);
  while (hi - lo > Scalar(1e-6)) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = evaluate(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = evaluate(d);
    }
  }

  result.qr_star = best_q;
  result.th_star = best_th;
  return result;
}

}  // namespace zzaloha
