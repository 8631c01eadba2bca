#pragma once

#include <algorithm>

#include "zzaloha/model.hpp"

namespace zzaloha {

/// Row-stochastic backlog transition matrix, one transition per frame.
/// probs(N, N2) is the probability of moving from backlog N to N2.
template <typename Scalar = double>
struct TransitionMatrix {
  Matrix<Scalar> probs;
  ModelParams<Scalar> params;

  int states() const { return static_cast<int>(probs.rows()); }
};

namespace detail {

// Kernels extended with zeros outside their support; the builders below sum
// terms whose kernel factor vanishes instead of special-casing boundary rows.
template <typename Scalar>
Scalar qa(int i, int backlog, const ModelParams<Scalar>& params) {
  return binomial_pmf(params.users - backlog, i, params.p_a);
}

template <typename Scalar>
Scalar qr(int i, int backlog, const ModelParams<Scalar>& params) {
  return binomial_pmf(backlog, i, params.q_r);
}

template <typename Scalar>
Scalar clamp_probability(Scalar x) {
  // brackets like 1 - qr0 - qr1 can round a hair below zero
  return std::max(x, Scalar(0));
}

}  // namespace detail

template <typename Scalar>
TransitionMatrix<Scalar> build_zigzag_paper(const ModelParams<Scalar>& params) {
  if (params.variant != Variant::ZigzagPaper)
    throw VariantMismatchError("build_zigzag_paper called with variant " +
                               std::string(variant_name(params.variant)));
  const int m = params.users;
  Matrix<Scalar> p = Matrix<Scalar>::Zero(m + 1, m + 1);
  for (int n = 0; n <= m; ++n) {
    const Scalar qa0 = detail::qa(0, n, params);
    const Scalar qa1 = detail::qa(1, n, params);
    const Scalar qa2 = detail::qa(2, n, params);
    const Scalar qr0 = detail::qr(0, n, params);
    const Scalar qr1 = detail::qr(1, n, params);
    const Scalar qr2 = detail::qr(2, n, params);  // = p_zigzag(n)
    for (int i = 3; i <= m - n; ++i) p(n, n + i) = detail::qa(i, n, params);
    if (n + 1 <= m) p(n, n + 1) = detail::clamp_probability(qa1 * (Scalar(1) - qr0 - qr1));
    if (n + 2 <= m) p(n, n + 2) = detail::clamp_probability(qa2 * (Scalar(1) - qr0));
    p(n, n) = detail::clamp_probability(qa0 * (Scalar(1) - qr1 - qr2) + (qr1 + qr0) * qa1 +
                                        qr0 * qa2);
    if (n >= 1) p(n, n - 1) = qa0 * qr1;
    if (n >= 2) p(n, n - 2) = qa0 * qr2;
  }
  return TransitionMatrix<Scalar>{std::move(p), params};
}

/// Same capability as zigzag-paper, with a mixed new+backlogged pair
/// resolved as two departures: the backlog drops by one instead of holding.
template <typename Scalar>
TransitionMatrix<Scalar> build_zigzag_strict(const ModelParams<Scalar>& params) {
  if (params.variant != Variant::ZigzagStrict)
    throw VariantMismatchError("build_zigzag_strict called with variant " +
                               std::string(variant_name(params.variant)));
  const int m = params.users;
  Matrix<Scalar> p = Matrix<Scalar>::Zero(m + 1, m + 1);
  for (int n = 0; n <= m; ++n) {
    const Scalar qa0 = detail::qa(0, n, params);
    const Scalar qa1 = detail::qa(1, n, params);
    const Scalar qa2 = detail::qa(2, n, params);
    const Scalar qr0 = detail::qr(0, n, params);
    const Scalar qr1 = detail::qr(1, n, params);
    const Scalar qr2 = detail::qr(2, n, params);
    for (int i = 3; i <= m - n; ++i) p(n, n + i) = detail::qa(i, n, params);
    if (n + 1 <= m) p(n, n + 1) = detail::clamp_probability(qa1 * (Scalar(1) - qr0 - qr1));
    if (n + 2 <= m) p(n, n + 2) = detail::clamp_probability(qa2 * (Scalar(1) - qr0));
    p(n, n) =
        detail::clamp_probability(qa0 * (Scalar(1) - qr1 - qr2) + qr0 * qa1 + qr0 * qa2);
    if (n >= 1) p(n, n - 1) = qa0 * qr1 + qa1 * qr1;
    if (n >= 2) p(n, n - 2) = qa0 * qr2;
  }
  return TransitionMatrix<Scalar>{std::move(p), params};
}

/// Classic slotted Aloha chain: any simultaneous pair collides, so the
/// backlog never drops by more than one per frame.
template <typename Scalar>
TransitionMatrix<Scalar> build_aloha_baseline(const ModelParams<Scalar>& params) {
  if (params.variant != Variant::AlohaBaseline)
    throw VariantMismatchError("build_aloha_baseline called with variant " +
                               std::string(variant_name(params.variant)));
  const int m = params.users;
  Matrix<Scalar> p = Matrix<Scalar>::Zero(m + 1, m + 1);
  for (int n = 0; n <= m; ++n) {
    const Scalar qa0 = detail::qa(0, n, params);
    const Scalar qa1 = detail::qa(1, n, params);
    const Scalar qr0 = detail::qr(0, n, params);
    const Scalar qr1 = detail::qr(1, n, params);
    for (int i = 2; i <= m - n; ++i) p(n, n + i) = detail::qa(i, n, params);
    if (n + 1 <= m) p(n, n + 1) = detail::clamp_probability(qa1 * (Scalar(1) - qr0));
    p(n, n) = detail::clamp_probability(qa1 * qr0 + qa0 * (Scalar(1) - qr1));
    if (n >= 1) p(n, n - 1) = qa0 * qr1;
  }
  return TransitionMatrix<Scalar>{std::move(p), params};
}

template <typename Scalar>
TransitionMatrix<Scalar> build_transition_matrix(const ModelParams<Scalar>& params) {
  switch (params.variant) {
    case Variant::AlohaBaseline:
      return build_aloha_baseline(params);
    case Variant::ZigzagPaper:
      return build_zigzag_paper(params);
    case Variant::ZigzagStrict:
      return build_zigzag_strict(params);
  }
  throw UnknownVariantError("variant enum out of range");
}

/// Expected one-frame backlog change at each state, straight from the matrix:
/// d[N] = sum_{N2} (N2 - N) P(N, N2). In steady state its pi-average is zero.
template <typename Scalar>
Vector<Scalar> chain_exact_drift(const TransitionMatrix<Scalar>& chain) {
  const int states = chain.states();
  Vector<Scalar> drift(states);
  for (int n = 0; n < states; ++n) {
    Scalar d(0);
    for (int n2 = 0; n2 < states; ++n2) d += Scalar(n2 - n) * chain.probs(n, n2);
    drift(n) = d;
  }
  return drift;
}

}  // namespace zzaloha
