#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "oslab/params.hpp"
#include "oslab/rng.hpp"
#include "oslab/tail.hpp"

namespace oslab {

// Exact finite-n state: per-queue occupancies plus the derived count tail
// m_k = |{i : lengths[i] >= k}|, kept in sync incrementally.  Queues are also
// indexed into per-level buckets so the longest-connected scan can walk
// occupied levels top-down instead of touching all n queues.
struct QueueSystemState {
  std::vector<int32_t> lengths;
  std::vector<int64_t> m;  // m[0] = n; m.back() > 0 unless size() == 1
  double time = 0.0;
  std::vector<std::deque<double>> arrival_times;  // per-queue FIFO of arrival stamps

  std::vector<std::vector<int32_t>> buckets;  // buckets[L]: queues of length exactly L >= 1
  std::vector<int32_t> bucket_pos;            // position of queue i inside its bucket
  int64_t total_packets = 0;

  static QueueSystemState empty(int64_t n);
  static QueueSystemState from_lengths(const std::vector<int32_t>& lengths);

  int32_t max_length() const { return static_cast<int32_t>(m.size()) - 1; }
  int64_t n() const { return static_cast<int64_t>(lengths.size()); }
  CountTail counts() const { return CountTail{m, time}; }
  TailVector tail() const { return tail_from_counts(counts(), n()); }

  // Full recomputation of m, buckets, and totals from lengths; throws
  // std::logic_error on any mismatch.
  void check_consistency() const;
};

enum class EventType { Arrival, SchedulingInstant };

struct Event {
  EventType type;
  int64_t queue = -1;  // arrival target; -1 for scheduling instants
  double holding_time = 0.0;
};

// Competes the aggregate arrival clock (rate n lambda) against the scheduling
// clock (rate n): advances state.time by an Exp(n(lambda+1)) holding time and
// picks ARRIVAL with probability lambda/(lambda+1), queue uniform.
Event next_event(QueueSystemState& state, const SystemParams& params, RandomStream& rng);

void apply_arrival(QueueSystemState& state, int64_t queue);

struct Served {
  int64_t queue;
  double arrival_time;  // stamp of the departed packet (FIFO within the queue)
};

// Serves a longest queue among the connected nonempty ones, ties uniform;
// nullopt when no connected queue holds a packet.  Channel states are drawn
// fresh each call and never stored.  Sampling walks buckets top-down: the
// top connected level is k with probability (1-q)^{m_{k+1}} - (1-q)^{m_k},
// exactly the law of per-queue independent channel draws.
std::optional<Served> schedule_lcq(QueueSystemState& state, const SystemParams& params,
                                   RandomStream& rng);

// The d-sample policy at one scheduling instant.  GeneratorFaithful: one
// Bernoulli(1-(1-q)^n) draw gates the instant, then d i.i.d. uniform queue
// indices over all n queues; serves a longest selected queue.  Physical:
// draws the connected-subset size Binomial(n,q) and samples the d candidates
// i.i.d. uniform from that subset.  Idles when nothing connected or every
// candidate is empty.
std::optional<Served> schedule_lcqd(QueueSystemState& state, const SystemParams& params,
                                    RandomStream& rng, int64_t d);

struct RunConfig {
  SystemParams params;
  double t_end = 100.0;
  double burn_in = -1.0;  // negative: default t_end / 2
  uint64_t seed = 1;
  double sample_interval = 0.1;
  // nullopt starts EMPTY; otherwise per-queue initial occupancies (stamped
  // with arrival time 0).
  std::optional<std::vector<int32_t>> initial_lengths;

  double effective_burn_in() const { return burn_in < 0.0 ? t_end / 2.0 : burn_in; }
};

struct EventCounts {
  int64_t arrivals = 0;
  int64_t services = 0;
  int64_t idles = 0;
};

struct RunResult {
  TailVector time_avg_tail;                 // time average of u over [burn_in, t_end]
  std::vector<double> total_occupancy_hist; // time-weighted pmf of total packets
  std::vector<double> max_queue_hist;       // time-weighted pmf of max queue length
  double mean_sojourn = 0.0;                // over packets arriving and departing in-window
  int64_t sojourn_count = 0;
  double little_arrival_rate_x_sojourn = 0.0;  // n lambda * mean_sojourn
  double little_time_avg_occupancy = 0.0;      // time-averaged total packets
  bool little_within_5pct = true;
  EventCounts event_counts;
  uint64_t seed = 0;
};

// Deterministic given the config (including seed); simulates to t_end and
// accumulates time-weighted statistics over [burn_in, t_end].
RunResult run(const RunConfig& config);

uint64_t replica_seed(uint64_t base_seed, int replica_index);

}  // namespace oslab
