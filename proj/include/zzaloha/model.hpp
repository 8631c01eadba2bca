#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace zzaloha {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrixd = Matrix<double>;
using Vectord = Vector<double>;

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};
class UnknownVariantError : public Error {
 public:
  using Error::Error;
};
class IndexOutOfRangeError : public Error {
 public:
  using Error::Error;
};
class VariantMismatchError : public Error {
 public:
  using Error::Error;
};
class NotConvergedError : public Error {
 public:
  using Error::Error;
};
class SingularSystemError : public Error {
 public:
  using Error::Error;
};
class LengthMismatchError : public Error {
 public:
  using Error::Error;
};
class UndefinedDelayError : public Error {
 public:
  using Error::Error;
};
class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

/// Channel model flavor.
///
/// aloha-baseline: classic slotted Aloha, every simultaneous pair collides.
/// zigzag-paper:   two-transmission frames are resolved over two slots; a
///                 mixed new+backlogged pair leaves the backlog unchanged.
/// zigzag-strict:  same resolution capability, but a mixed pair removes the
///                 backlogged packet, so the backlog drops by one.
enum class Variant { AlohaBaseline, ZigzagPaper, ZigzagStrict };

inline std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::AlohaBaseline:
      return "aloha-baseline";
    case Variant::ZigzagPaper:
      return "zigzag-paper";
    case Variant::ZigzagStrict:
      return "zigzag-strict";
  }
  throw UnknownVariantError("variant enum out of range");
}

inline Variant parse_variant(std::string_view name) {
  if (name == "aloha-baseline") return Variant::AlohaBaseline;
  if (name == "zigzag-paper") return Variant::ZigzagPaper;
  if (name == "zigzag-strict") return Variant::ZigzagStrict;
  throw UnknownVariantError("unknown variant '" + std::string(name) +
                            "' (expected aloha-baseline, zigzag-paper or zigzag-strict)");
}

inline constexpr int max_supported_users = 1000;

/// Validated protocol parameters.
///
/// users ∈ [1, 1000]; p_a, q_r strictly inside (0,1). Boundary probabilities
/// are rejected because they can disconnect the backlog chain (q_r = 1 makes
/// three or more backlogged packets retransmit forever; p_a = 1 can make low
/// states unreachable), and every solver here assumes an irreducible chain.
template <typename Scalar = double>
struct ModelParams {
  int users = 0;        // M, nodes sharing the channel
  Scalar p_a = Scalar(0);  // fresh-packet transmission probability per frame
  Scalar q_r = Scalar(0);  // retransmission probability per frame
  Variant variant = Variant::ZigzagPaper;

  int states() const { return users + 1; }  // backlog lives in 0..users
};

template <typename Scalar = double>
ModelParams<Scalar> validate_params(int users, Scalar p_a, Scalar q_r, Variant variant) {
  if (users < 1 || users > max_supported_users)
    throw OutOfRangeError("users must be in [1, " + std::to_string(max_supported_users) +
                          "], got " + std::to_string(users));
  if (!(p_a > Scalar(0) && p_a < Scalar(1)))
    throw OutOfRangeError("p_a must lie strictly inside (0,1)");
  if (!(q_r > Scalar(0) && q_r < Scalar(1)))
    throw OutOfRangeError("q_r must lie strictly inside (0,1)");
  switch (variant) {
    case Variant::AlohaBaseline:
    case Variant::ZigzagPaper:
    case Variant::ZigzagStrict:
      break;
    default:
      throw UnknownVariantError("variant enum out of range");
  }
  return ModelParams<Scalar>{users, p_a, q_r, variant};
}

template <typename Scalar = double>
ModelParams<Scalar> validate_params(int users, Scalar p_a, Scalar q_r, std::string_view variant) {
  return validate_params(users, p_a, q_r, parse_variant(variant));
}

/// Binomial probability C(n,k) p^k (1-p)^(n-k), evaluated multiplicatively.
///
/// The C(n,k) ratio factors and the (1-p) powers are interleaved so the
/// running product stays in range even for n = 1000 where the bare
/// coefficient would dwarf the power terms. Out-of-support k yields 0.
template <typename Scalar>
Scalar binomial_pmf(int n, int k, Scalar p) {
  if (k < 0 || k > n) return Scalar(0);
  const Scalar q = Scalar(1) - p;
  Scalar r(1);
  int ratio_taken = 0;  // consumed factors p*(n-k+j)/j, j = 1..k
  int q_taken = 0;      // consumed factors (1-p), n-k of them
  while (ratio_taken < k || q_taken < n - k) {
    if (q_taken >= n - k || (ratio_taken < k && r <= Scalar(1))) {
      ++ratio_taken;
      r *= p * Scalar(n - k + ratio_taken) / Scalar(ratio_taken);
    } else {
      r *= q;
      ++q_taken;
    }
  }
  return r;
}

namespace detail {

template <typename Scalar>
void check_backlog_state(int backlog, const ModelParams<Scalar>& params) {
  if (backlog < 0 || backlog > params.users)
    throw OutOfRangeError("backlog state " + std::to_string(backlog) + " outside 0.." +
                          std::to_string(params.users));
}

}  // namespace detail

/// Probability that exactly i of the M-N unbacklogged nodes transmit a new
/// packet in a frame.
template <typename Scalar>
Scalar q_arrive(int i, int backlog, const ModelParams<Scalar>& params) {
  detail::check_backlog_state(backlog, params);
  const int free_nodes = params.users - backlog;
  if (i < 0 || i > free_nodes)
    throw IndexOutOfRangeError("arrival count " + std::to_string(i) + " outside 0.." +
                               std::to_string(free_nodes));
  return binomial_pmf(free_nodes, i, params.p_a);
}

/// Probability that exactly i of the N backlogged nodes retransmit in a frame.
template <typename Scalar>
Scalar q_retransmit(int i, int backlog, const ModelParams<Scalar>& params) {
  detail::check_backlog_state(backlog, params);
  if (i < 0 || i > backlog)
    throw IndexOutOfRangeError("retransmission count " + std::to_string(i) + " outside 0.." +
                               std::to_string(backlog));
  return binomial_pmf(backlog, i, params.q_r);
}

/// Probability that exactly two backlogged nodes retransmit, i.e. the frame
/// is resolvable as a two-slot decode among backlogged packets. Zero when
/// fewer than two packets are backlogged.
template <typename Scalar>
Scalar p_zigzag(int backlog, const ModelParams<Scalar>& params) {
  detail::check_backlog_state(backlog, params);
  return binomial_pmf(backlog, 2, params.q_r);
}

}  // namespace zzaloha
