#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "zzaloha/model.hpp"

namespace zzaloha {

/// Receiver feedback after the first slot of a frame.
enum class FrameOutcome { Idle, Success, ZigZag, Collision };

constexpr int slots_consumed(FrameOutcome outcome) {
  return outcome == FrameOutcome::ZigZag ? 2 : 1;
}

inline std::string_view outcome_name(FrameOutcome outcome) {
  switch (outcome) {
    case FrameOutcome::Idle:
      return "idle";
    case FrameOutcome::Success:
      return "success";
    case FrameOutcome::ZigZag:
      return "zigzag";
    case FrameOutcome::Collision:
      return "collision";
  }
  return "collision";
}

enum class TimeAccounting { PerFrame, PerSlot };

inline std::string_view accounting_name(TimeAccounting t) {
  return t == TimeAccounting::PerFrame ? "per-frame" : "per-slot";
}

struct SimConfig {
  ModelParams<double> params;
  std::int64_t frames = 0;
  std::int64_t warmup_frames = -1;  // negative: use frames / 10
  std::uint64_t seed = 1;
  int replications = 1;
  TimeAccounting time_accounting = TimeAccounting::PerFrame;

  std::int64_t effective_warmup() const {
    return warmup_frames < 0 ? frames / 10 : warmup_frames;
  }
};

/// Per-replication measurement summary.
struct ReplicationStats {
  std::uint64_t stream_seed = 0;
  std::int64_t measured_frames = 0;
  std::int64_t measured_slots = 0;
  std::int64_t delivered = 0;            // packets delivered in the window
  std::int64_t delivered_first_try = 0;  // delivered in their birth frame
  std::int64_t arrivals = 0;             // new packets born in the window
  std::int64_t backlog_at_start = 0;     // at the first measured frame
  std::int64_t backlog_at_end = 0;
  std::array<std::int64_t, 4> frames_by_outcome{};
  double throughput_per_frame = 0;
  double throughput_per_slot = 0;
  double new_packet_throughput_per_frame = 0;
  double mean_delay_slots = 0;   // over packets delivered in the window
  double mean_delay_frames = 0;  // same packets, counted in frames
  double mean_backlog = 0;       // backlog at frame start, averaged
  Eigen::VectorXd occupancy;     // fraction of measured frames per state
};

struct SimResult {
  Eigen::VectorXd empirical_occupancy;  // averaged across replications
  double throughput_mean = 0;  // per frame or per slot, per time_accounting
  double throughput_stderr = 0;
  double new_packet_throughput_mean = 0;
  double new_packet_throughput_stderr = 0;
  double mean_delay = 0;  // slots
  double delay_stderr = 0;
  double mean_delay_frames = 0;
  double mean_delay_frames_stderr = 0;
  double mean_backlog = 0;
  double mean_backlog_stderr = 0;
  std::array<std::int64_t, 4> frames_by_outcome{};  // summed across replications
  std::uint64_t seed = 0;
  std::int64_t measured_frames = 0;  // summed across replications
  std::int64_t measured_slots = 0;
  std::int64_t packets_delivered = 0;
  double throughput_per_frame_mean = 0;
  double throughput_per_frame_stderr = 0;
  double throughput_per_slot_mean = 0;
  double throughput_per_slot_stderr = 0;
  std::vector<ReplicationStats> replications;
};

/// Stream seed for one replication: an avalanche mix of the master seed and
/// the replication index. The finalizer is a bijection applied to distinct
/// inputs, so distinct indices can never collide for a fixed master seed.
inline std::uint64_t derive_replication_seed(std::uint64_t master_seed,
                                             std::uint64_t replication_index) {
  std::uint64_t z = master_seed ^ (0x9E3779B97F4A7C15ULL * (replication_index + 1));
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct PendingPacket {
  std::int64_t birth_slot;   // first slot of the frame of first transmission
  std::int64_t birth_frame;
};

inline ReplicationStats simulate_replication(const SimConfig& config,
                                             std::uint64_t stream_seed) {
  const int m = config.params.users;
  const double p_a = config.params.p_a;
  const double q_r = config.params.q_r;
  const std::int64_t warmup = config.effective_warmup();

  std::mt19937_64 rng(stream_seed);
  std::vector<PendingPacket> backlog;
  backlog.reserve(m);
  std::vector<int> retransmitters;
  retransmitters.reserve(m);

  ReplicationStats stats;
  stats.stream_seed = stream_seed;
  stats.occupancy = Eigen::VectorXd::Zero(m + 1);

  std::int64_t slot = 0;
  std::int64_t backlog_frame_sum = 0;
  std::int64_t delay_slot_sum = 0;
  std::int64_t delay_frame_sum = 0;

  for (std::int64_t frame = 0; frame < config.frames; ++frame) {
    const bool measured = frame >= warmup;
    const std::int64_t frame_start_slot = slot;
    const int n = static_cast<int>(backlog.size());
    if (measured) {
      if (stats.measured_frames == 0) stats.backlog_at_start = n;
      ++stats.measured_frames;
      stats.occupancy(n) += 1.0;
      backlog_frame_sum += n;
    }

    // every unbacklogged user may transmit a fresh packet...
    int new_tx = 0;
    for (int u = 0; u < m - n; ++u)
      if (uniform01(rng) < p_a) ++new_tx;
    // ...and every backlogged one may retransmit
    retransmitters.clear();
    for (int j = 0; j < n; ++j)
      if (uniform01(rng) < q_r) retransmitters.push_back(j);
    const int total_tx = new_tx + static_cast<int>(retransmitters.size());

    FrameOutcome outcome;
    if (total_tx == 0)
      outcome = FrameOutcome::Idle;
    else if (total_tx == 1)
      outcome = FrameOutcome::Success;
    else if (total_tx == 2)
      outcome = FrameOutcome::ZigZag;
    else
      outcome = FrameOutcome::Collision;
    const std::int64_t frame_end_slot = frame_start_slot + slots_consumed(outcome) - 1;

    if (measured) {
      ++stats.frames_by_outcome[static_cast<int>(outcome)];
      stats.arrivals += new_tx;
      stats.measured_slots += slots_consumed(outcome);
    }

    auto record_departure = [&](std::int64_t birth_slot, std::int64_t birth_frame) {
      if (!measured) return;
      ++stats.delivered;
      if (birth_frame == frame) ++stats.delivered_first_try;
      delay_slot_sum += frame_end_slot - birth_slot + 1;
      delay_frame_sum += frame - birth_frame + 1;
    };

    if (outcome == FrameOutcome::Success || outcome == FrameOutcome::ZigZag) {
      for (int k = 0; k < new_tx; ++k) record_departure(frame_start_slot, frame);
      // remove delivered backlogged packets back-to-front so indices hold
      for (auto it = retransmitters.rbegin(); it != retransmitters.rend(); ++it) {
        record_departure(backlog[*it].birth_slot, backlog[*it].birth_frame);
        backlog[*it] = backlog.back();
        backlog.pop_back();
      }
    } else if (outcome == FrameOutcome::Collision) {
      for (int k = 0; k < new_tx; ++k) backlog.push_back({frame_start_slot, frame});
    }

    slot = frame_end_slot + 1;
  }

  stats.backlog_at_end = static_cast<std::int64_t>(backlog.size());
  const double frames_d = static_cast<double>(stats.measured_frames);
  stats.occupancy /= frames_d;
  stats.mean_backlog = static_cast<double>(backlog_frame_sum) / frames_d;
  stats.throughput_per_frame = static_cast<double>(stats.delivered) / frames_d;
  stats.throughput_per_slot =
      static_cast<double>(stats.delivered) / static_cast<double>(stats.measured_slots);
  stats.new_packet_throughput_per_frame =
      static_cast<double>(stats.delivered_first_try) / frames_d;
  if (stats.delivered > 0) {
    stats.mean_delay_slots =
        static_cast<double>(delay_slot_sum) / static_cast<double>(stats.delivered);
    stats.mean_delay_frames =
        static_cast<double>(delay_frame_sum) / static_cast<double>(stats.delivered);
  }
  return stats;
}

inline void mean_and_stderr(const std::vector<double>& values, double& mean, double& err) {
  const double count = static_cast<double>(values.size());
  double total = 0;
  for (double v : values) total += v;
  mean = total / count;
  if (values.size() < 2) {
    err = 0;
    return;
  }
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  err = std::sqrt(ss / (count - 1) / count);
}

}  // namespace detail

/// Slot-level Monte Carlo run of the resolution-capable protocol: a lone
/// transmission succeeds in one slot, exactly two simultaneous transmissions
/// are both decoded over a two-slot frame, three or more collide. Arrivals
/// are drawn once per frame so the run lives on the same probability space
/// as the analytic chain. Fully deterministic for a fixed config.
inline SimResult simulate(const SimConfig& config) {
  validate_params(config.params.users, config.params.p_a, config.params.q_r,
                  config.params.variant);
  if (config.frames < 1) throw InvalidConfigError("frames must be >= 1");
  if (config.effective_warmup() >= config.frames)
    throw InvalidConfigError("warmup_frames must be smaller than frames");
  if (config.replications < 1) throw InvalidConfigError("replications must be >= 1");

  SimResult result;
  result.seed = config.seed;
  result.replications.reserve(config.replications);
  for (int r = 0; r < config.replications; ++r)
    result.replications.push_back(
        detail::simulate_replication(config, derive_replication_seed(config.seed, r)));

  const int states = config.params.users + 1;
  result.empirical_occupancy = Eigen::VectorXd::Zero(states);
  std::vector<double> th_pf, th_ps, th_new, delay_slots, delay_frames, backlog;
  for (const auto& rep : result.replications) {
    result.empirical_occupancy += rep.occupancy;
    for (int k = 0; k < 4; ++k) result.frames_by_outcome[k] += rep.frames_by_outcome[k];
    result.measured_frames += rep.measured_frames;
    result.measured_slots += rep.measured_slots;
    result.packets_delivered += rep.delivered;
    th_pf.push_back(rep.throughput_per_frame);
    th_ps.push_back(rep.throughput_per_slot);
    th_new.push_back(rep.new_packet_throughput_per_frame);
    delay_slots.push_back(rep.mean_delay_slots);
    delay_frames.push_back(rep.mean_delay_frames);
    backlog.push_back(rep.mean_backlog);
  }
  result.empirical_occupancy /= static_cast<double>(config.replications);

  detail::mean_and_stderr(th_pf, result.throughput_per_frame_mean,
                          result.throughput_per_frame_stderr);
  detail::mean_and_stderr(th_ps, result.throughput_per_slot_mean,
                          result.throughput_per_slot_stderr);
  detail::mean_and_stderr(delay_slots, result.mean_delay, result.delay_stderr);
  detail::mean_and_stderr(delay_frames, result.mean_delay_frames,
                          result.mean_delay_frames_stderr);
  detail::mean_and_stderr(backlog, result.mean_backlog, result.mean_backlog_stderr);
  detail::mean_and_stderr(th_new, result.new_packet_throughput_mean,
                          result.new_packet_throughput_stderr);
  if (config.time_accounting == TimeAccounting::PerFrame) {
    result.throughput_mean = result.throughput_per_frame_mean;
    result.throughput_stderr = result.throughput_per_frame_stderr;
  } else {
    result.throughput_mean = result.throughput_per_slot_mean;
    result.throughput_stderr = result.throughput_per_slot_stderr;
    const double slots_per_frame = static_cast<double>(result.measured_slots) /
                                   static_cast<double>(result.measured_frames);
    result.new_packet_throughput_mean /= slots_per_frame;
    result.new_packet_throughput_stderr /= slots_per_frame;
  }
  return result;
}

}  // namespace zzaloha
