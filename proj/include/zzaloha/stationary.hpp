#pragma once

#include <cmath>
#include <string_view>
#include <utility>

#include "zzaloha/chain.hpp"

namespace zzaloha {

enum class SolveMethod { Direct, PowerIteration };

inline std::string_view method_name(SolveMethod m) {
  return m == SolveMethod::Direct ? "direct" : "power-iteration";
}

template <typename Scalar = double>
struct StationaryDistribution {
  Vector<Scalar> pi;
  Scalar residual = Scalar(0);  // max-norm of pi*P - pi
  SolveMethod method = SolveMethod::Direct;
  long iterations = 0;  // 0 for the direct solve
};

struct SolveOptions {
  // Equation of (P^T - I)x = 0 replaced by the normalization sum(x) = 1;
  // -1 means the last one. The solution must not depend on this choice.
  int normalization_row = -1;
  // Slow-mixing chains (spectral gap near 3e-6 occurs already at M = 10)
  // leave a slow-mode error of roughly change/gap when iteration stops, so
  // the change tolerance sits near the rounding floor and the cap allows
  // the few-million iterations those chains need.
  double power_tolerance = 1e-15;  // successive max-norm change
  long max_power_iterations = 20'000'000;
  double residual_tolerance = 1e-10;
};

namespace detail {

// Clamp round-off negatives and renormalize; anything clearly negative means
// the solve produced garbage rather than noise.
template <typename Scalar>
void finalize_distribution(Vector<Scalar>& x, const char* what) {
  if (!x.allFinite()) throw SingularSystemError(std::string(what) + ": non-finite solution");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < Scalar(0)) {
      if (x(i) < Scalar(-1e-10))
        throw SingularSystemError(std::string(what) + ": solution has a negative component");
      x(i) = Scalar(0);
    }
  }
  const Scalar total = x.sum();
  if (!(total > Scalar(0)))
    throw SingularSystemError(std::string(what) + ": solution sums to zero");
  x /= total;
}

template <typename Scalar>
Scalar stationary_residual(const Matrix<Scalar>& p, const Vector<Scalar>& x) {
  return (p.transpose() * x - x).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Direct solve of pi P = pi, sum(pi) = 1: one balance equation is replaced
/// by the normalization and the dense system goes through an LU factorization
/// with partial pivoting.
template <typename Scalar>
StationaryDistribution<Scalar> solve_stationary_direct(const TransitionMatrix<Scalar>& chain,
                                                       const SolveOptions& opts = {}) {
  const int n = chain.states();
  const int row = opts.normalization_row < 0 ? n - 1 : opts.normalization_row;
  if (row < 0 || row >= n)
    throw OutOfRangeError("normalization_row " + std::to_string(opts.normalization_row) +
                          " outside 0.." + std::to_string(n - 1));
  Matrix<Scalar> a = chain.probs.transpose() - Matrix<Scalar>::Identity(n, n);
  a.row(row).setOnes();
  Vector<Scalar> b = Vector<Scalar>::Zero(n);
  b(row) = Scalar(1);

  Eigen::PartialPivLU<Matrix<Scalar>> lu(a);
  // A chain with more than one recurrent class leaves this system singular,
  // which surfaces as a collapsed pivot. Legitimate models keep the pivot
  // ratio above 3e-6 even at M = 1000.
  const Vector<Scalar> pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > Scalar(1e-13) * pivots.maxCoeff()))
    throw SingularSystemError("direct stationary solve: singular balance system "
                              "(matrix not irreducible?)");
  Vector<Scalar> x = lu.solve(b);
  detail::finalize_distribution(x, "direct stationary solve");
  const Scalar residual = detail::stationary_residual(chain.probs, x);
  if (!(residual <= Scalar(opts.residual_tolerance)))
    throw SingularSystemError("direct stationary solve: residual " + std::to_string(residual) +
                              " exceeds tolerance (matrix not irreducible?)");
  return StationaryDistribution<Scalar>{std::move(x), residual, SolveMethod::Direct, 0};
}

/// Left power iteration x <- xP from the uniform vector, stopping once the
/// successive max-norm change drops to opts.power_tolerance.
template <typename Scalar>
StationaryDistribution<Scalar> solve_stationary_power(const TransitionMatrix<Scalar>& chain,
                                                      const SolveOptions& opts = {}) {
  const int n = chain.states();
  Vector<Scalar> x = Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  long iterations = 0;
  bool converged = false;
  while (iterations < opts.max_power_iterations) {
    Vector<Scalar> next = chain.probs.transpose() * x;
    next /= next.sum();
    ++iterations;
    const Scalar change = (next - x).cwiseAbs().maxCoeff();
    x = std::move(next);
    if (change <= Scalar(opts.power_tolerance)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NotConvergedError("power iteration did not converge within " +
                            std::to_string(opts.max_power_iterations) + " iterations");
  detail::finalize_distribution(x, "power iteration");
  const Scalar residual = detail::stationary_residual(chain.probs, x);
  if (!(residual <= Scalar(opts.residual_tolerance)))
    throw NotConvergedError("power iteration: residual " + std::to_string(residual) +
                            " exceeds tolerance");
  return StationaryDistribution<Scalar>{std::move(x), residual, SolveMethod::PowerIteration,
                                        iterations};
}

template <typename Scalar>
StationaryDistribution<Scalar> solve_stationary(const TransitionMatrix<Scalar>& chain,
                                                SolveMethod method = SolveMethod::Direct,
                                                const SolveOptions& opts = {}) {
  return method == SolveMethod::Direct ? solve_stationary_direct(chain, opts)
                                       : solve_stationary_power(chain, opts);
}

/// Total-variation distance (1/2) sum |a_i - b_i| between two distributions.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar total_variation_distance(const Eigen::MatrixBase<DerivedA>& a,
                                                   const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size())
    throw LengthMismatchError("distributions have lengths " + std::to_string(a.size()) +
                              " and " + std::to_string(b.size()));
  if (std::abs(a.sum() - Scalar(1)) > Scalar(1e-9) ||
      std::abs(b.sum() - Scalar(1)) > Scalar(1e-9))
    throw OutOfRangeError("total_variation_distance expects normalized distributions");
  return (a - b).cwiseAbs().sum() / Scalar(2);
}

}  // namespace zzaloha
