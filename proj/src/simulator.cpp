// Event-driven simulation of the exact n-queue system.  All channel
// randomness is drawn lazily at scheduling instants; queue state updates are
// O(1) per event via per-level buckets, so a run costs O(events * d) for the
// sampled policies and O(events * levels) for the full scan.

#include "oslab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "oslab/numeric.hpp"

namespace oslab {

namespace {

constexpr int64_t kMaxQueues = std::numeric_limits<int32_t>::max();

void bucket_insert(QueueSystemState& s, int32_t queue, int32_t level) {
  if (level <= 0) return;
  if (static_cast<size_t>(level) >= s.buckets.size()) s.buckets.resize(level + 1);
  s.bucket_pos[queue] = static_cast<int32_t>(s.buckets[level].size());
  s.buckets[level].push_back(queue);
}

void bucket_remove(QueueSystemState& s, int32_t queue, int32_t level) {
  if (level <= 0) return;
  auto& bucket = s.buckets[level];
  const int32_t pos = s.bucket_pos[queue];
  const int32_t moved = bucket.back();
  bucket[pos] = moved;
  s.bucket_pos[moved] = pos;
  bucket.pop_back();
}

void count_increment(std::vector<int64_t>& m, int32_t new_level) {
  // One queue moved from new_level-1 to new_level: only m[new_level] changes.
  if (static_cast<size_t>(new_level) >= m.size()) m.push_back(0);
  m[new_level] += 1;
}

void count_decrement(std::vector<int64_t>& m, int32_t old_level) {
  m[old_level] -= 1;
  while (m.size() > 1 && m.back() == 0) m.pop_back();
}

Served serve(QueueSystemState& s, int64_t queue) {
  const int32_t i = static_cast<int32_t>(queue);
  const int32_t level = s.lengths[i];
  bucket_remove(s, i, level);
  s.lengths[i] = level - 1;
  bucket_insert(s, i, level - 1);
  count_decrement(s.m, level);
  s.total_packets -= 1;
  const double stamp = s.arrival_times[i].front();
  s.arrival_times[i].pop_front();
  return Served{queue, stamp};
}

}  // namespace

QueueSystemState QueueSystemState::empty(int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (n > kMaxQueues) throw std::invalid_argument("n exceeds supported queue count");
  QueueSystemState s;
  s.lengths.assign(n, 0);
  s.m.assign(1, n);
  s.arrival_times.resize(n);
  s.buckets.assign(1, {});
  s.bucket_pos.assign(n, -1);
  return s;
}

QueueSystemState QueueSystemState::from_lengths(const std::vector<int32_t>& lengths) {
  QueueSystemState s = empty(static_cast<int64_t>(lengths.size()));
  for (size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] < 0) throw std::invalid_argument("queue lengths must be nonnegative");
    for (int32_t p = 0; p < lengths[i]; ++p) {
      apply_arrival(s, static_cast<int64_t>(i));
    }
  }
  return s;
}

void QueueSystemState::check_consistency() const {
  const int64_t nq = n();
  std::vector<int64_t> want_m(1, nq);
  int64_t want_total = 0;
  for (int64_t i = 0; i < nq; ++i) {
    const int32_t len = lengths[i];
    if (len < 0) throw std::logic_error("state check: negative queue length");
    if (static_cast<size_t>(len) >= want_m.size()) want_m.resize(len + 1, 0);
    for (int32_t k = 1; k <= len; ++k) want_m[k] += 1;
    want_total += len;
    if (static_cast<size_t>(arrival_times[i].size()) != static_cast<size_t>(len)) {
      throw std::logic_error("state check: FIFO stamp count mismatch");
    }
  }
  if (want_m != m) throw std::logic_error("state check: count tail out of sync");
  if (want_total != total_packets) throw std::logic_error("state check: total packets out of sync");
  std::vector<int64_t> bucket_totals(buckets.size(), 0);
  for (size_t level = 1; level < buckets.size(); ++level) {
    for (const int32_t queue : buckets[level]) {
      if (lengths[queue] != static_cast<int32_t>(level)) {
        throw std::logic_error("state check: queue filed in wrong bucket");
      }
      if (buckets[level][bucket_pos[queue]] != queue) {
        throw std::logic_error("state check: bucket position out of sync");
      }
      bucket_totals[level] += 1;
    }
  }
  for (size_t level = 1; level < buckets.size(); ++level) {
    const int64_t at_level =
        (level < m.size() ? m[level] : 0) - (level + 1 < m.size() ? m[level + 1] : 0);
    if (bucket_totals[level] != at_level) {
      throw std::logic_error("state check: bucket size disagrees with count tail");
    }
  }
}

Event next_event(QueueSystemState& state, const SystemParams& params, RandomStream& rng) {
  const double n = static_cast<double>(state.n());
  const double total_rate = n * (params.lambda + 1.0);
  const double holding = rng.exponential(total_rate);
  state.time += holding;
  Event ev;
  ev.holding_time = holding;
  if (rng.bernoulli(params.lambda / (params.lambda + 1.0))) {
    ev.type = EventType::Arrival;
    ev.queue = rng.uniform_index(state.n());
  } else {
    ev.type = EventType::SchedulingInstant;
  }
  return ev;
}

void apply_arrival(QueueSystemState& state, int64_t queue) {
  const int32_t i = static_cast<int32_t>(queue);
  const int32_t level = state.lengths[i];
  bucket_remove(state, i, level);
  state.lengths[i] = level + 1;
  bucket_insert(state, i, level + 1);
  count_increment(state.m, level + 1);
  state.total_packets += 1;
  state.arrival_times[i].push_back(state.time);
}

std::optional<Served> schedule_lcq(QueueSystemState& state, const SystemParams& params,
                                   RandomStream& rng) {
  // Walk occupied levels top-down.  Conditioned on every longer queue being
  // disconnected, some queue at level L (bucket size b) is connected with
  // probability 1 - (1-q)^b, and the served one is uniform over the bucket
  // by exchangeability.  The level law telescopes to
  // (1-q)^{m_{L+1}} - (1-q)^{m_L}, matching per-queue channel draws.
  const double miss = 1.0 - params.q;
  for (int32_t level = state.max_length(); level >= 1; --level) {
    const int64_t below = (static_cast<size_t>(level) + 1 < state.m.size())
                              ? state.m[level + 1]
                              : 0;
    const int64_t bucket_size = state.m[level] - below;
    if (bucket_size == 0) continue;
    if (!rng.bernoulli(1.0 - ipow(miss, bucket_size))) continue;
    const int64_t pick = rng.uniform_index(bucket_size);
    return serve(state, state.buckets[level][pick]);
  }
  return std::nullopt;
}

namespace {

// Tracks the longest queue(s) among sampled candidates; ties resolved
// uniformly over the distinct selected queues attaining the max.
struct BestTracker {
  int32_t best_len = 0;
  std::vector<int64_t> at_best;

  void offer(int64_t queue, int32_t len) {
    if (len <= 0 || len < best_len) return;
    if (len > best_len) {
      best_len = len;
      at_best.clear();
      at_best.push_back(queue);
      return;
    }
    if (std::find(at_best.begin(), at_best.end(), queue) == at_best.end()) {
      at_best.push_back(queue);
    }
  }

  std::optional<int64_t> pick(RandomStream& rng) const {
    if (at_best.empty()) return std::nullopt;
    return at_best[rng.uniform_index(static_cast<int64_t>(at_best.size()))];
  }
};

std::optional<Served> lcqd_generator_faithful(QueueSystemState& state, double q,
                                              RandomStream& rng, int64_t d) {
  // Gate on "at least one of the n channels is on", probability
  // alpha_n = 1 - (1-q)^n, then sample d queue indices with replacement.
  const double alpha_n = 1.0 - ipow(1.0 - q, state.n());
  if (!rng.bernoulli(alpha_n)) return std::nullopt;
  BestTracker best;
  for (int64_t j = 0; j < d; ++j) {
    const int64_t queue = rng.uniform_index(state.n());
    best.offer(queue, state.lengths[queue]);
  }
  const auto pick = best.pick(rng);
  if (!pick) return std::nullopt;
  return serve(state, *pick);
}

std::optional<Served> lcqd_physical(QueueSystemState& state, double q, RandomStream& rng,
                                    int64_t d) {
  // Realizes "draw every channel, then sample d connected queues with
  // replacement" without touching all n queues.  The connected-set size is
  // Binomial(n, q); each of the d picks either repeats one of the r distinct
  // queues drawn so far (probability r/c) or is a fresh uniform draw from the
  // n - r untouched queues.  Conditioned on c, the untouched connected queues
  // are exchangeable among the untouched queues, so this is the exact law of
  // i.i.d. uniform picks from the connected subset.
  const int64_t n = state.n();
  const int64_t connected = rng.binomial(n, q);
  if (connected == 0) return std::nullopt;
  std::vector<int64_t> distinct;
  BestTracker best;
  for (int64_t j = 0; j < d; ++j) {
    const int64_t r = static_cast<int64_t>(distinct.size());
    const bool repeat =
        r > 0 && (r >= connected ||
                  rng.bernoulli(static_cast<double>(r) / static_cast<double>(connected)));
    int64_t queue;
    if (repeat) {
      queue = distinct[rng.uniform_index(r)];
    } else {
      do {
        queue = rng.uniform_index(n);
      } while (std::find(distinct.begin(), distinct.end(), queue) != distinct.end());
      distinct.push_back(queue);
    }
    best.offer(queue, state.lengths[queue]);
  }
  const auto pick = best.pick(rng);
  if (!pick) return std::nullopt;
  return serve(state, *pick);
}

}  // namespace

std::optional<Served> schedule_lcqd(QueueSystemState& state, const SystemParams& params,
                                    RandomStream& rng, int64_t d) {
  if (d < 1) throw std::invalid_argument("d >= 1 required");
  const SelectionMode mode =
      params.policy.selection_mode.value_or(SelectionMode::GeneratorFaithful);
  if (mode == SelectionMode::Physical) {
    return lcqd_physical(state, params.q, rng, d);
  }
  return lcqd_generator_faithful(state, params.q, rng, d);
}

uint64_t replica_seed(uint64_t base_seed, int replica_index) {
  return base_seed ^ splitmix64(static_cast<uint64_t>(replica_index));
}

namespace {

void accumulate_window(std::vector<double>& acc, size_t index, double weight) {
  if (index >= acc.size()) acc.resize(index + 1, 0.0);
  acc[index] += weight;
}

}  // namespace

RunResult run(const RunConfig& config) {
  validate_params(config.params);
  if (!(config.t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!(config.sample_interval > 0.0)) {
    throw std::invalid_argument("sample_interval must be > 0");
  }
  const double burn_in = config.effective_burn_in();
  if (!(burn_in < config.t_end)) throw std::invalid_argument("burn_in must be < t_end");

  QueueSystemState state =
      config.initial_lengths ? QueueSystemState::from_lengths(*config.initial_lengths)
                             : QueueSystemState::empty(config.params.n);
  if (state.n() != config.params.n) {
    throw std::invalid_argument("initial_lengths size must equal n");
  }
  RandomStream rng(config.seed);
  const SystemParams& params = config.params;
  const int64_t d = params.policy.kind == PolicyKind::Lcq ? 0 : effective_d(params);

  const double window = config.t_end - burn_in;
  std::vector<double> level_time;  // level_time[k] = integral of m_k over the window, k >= 1
  std::vector<double> occupancy_time;
  std::vector<double> max_len_time;
  double total_occupancy_time = 0.0;
  double sojourn_sum = 0.0;
  int64_t sojourn_count = 0;
  EventCounts counts;
  double next_sample = config.sample_interval;

  while (true) {
    const double t0 = state.time;
    const Event ev = next_event(state, params, rng);
    const double t1 = state.time;

    const double lo = std::max(t0, burn_in);
    const double hi = std::min(t1, config.t_end);
    if (hi > lo) {
      const double w = hi - lo;
      for (size_t k = 1; k < state.m.size(); ++k) {
        accumulate_window(level_time, k, static_cast<double>(state.m[k]) * w);
      }
      accumulate_window(occupancy_time, static_cast<size_t>(state.total_packets), w);
      accumulate_window(max_len_time, static_cast<size_t>(state.max_length()), w);
      total_occupancy_time += static_cast<double>(state.total_packets) * w;
    }

#ifdef NDEBUG
    if (t1 >= next_sample) {
      state.check_consistency();
      while (next_sample <= t1) next_sample += config.sample_interval;
    }
#endif

    if (t1 > config.t_end) break;

    if (ev.type == EventType::Arrival) {
      apply_arrival(state, ev.queue);
      counts.arrivals += 1;
    } else {
      const std::optional<Served> served =
          params.policy.kind == PolicyKind::Lcq ? schedule_lcq(state, params, rng)
                                                : schedule_lcqd(state, params, rng, d);
      if (served) {
        counts.services += 1;
        if (served->arrival_time > burn_in) {
          sojourn_sum += t1 - served->arrival_time;
          sojourn_count += 1;
        }
      } else {
        counts.idles += 1;
      }
    }

#ifndef NDEBUG
    state.check_consistency();
#endif
  }
  state.time = config.t_end;

  RunResult result;
  result.seed = config.seed;
  result.event_counts = counts;

  // level_time[0] is never written; u_k = integral of m_k / (n * window).
  const double scale = static_cast<double>(params.n) * window;
  std::vector<double> u{1.0};
  for (size_t k = 1; k < level_time.size(); ++k) u.push_back(level_time[k] / scale);
  while (u.size() > 1 && u.back() == 0.0) u.pop_back();
  result.time_avg_tail = TailVector::from_entries(u, 1e-12);

  result.total_occupancy_hist = occupancy_time;
  for (double& x : result.total_occupancy_hist) x /= window;
  result.max_queue_hist = max_len_time;
  for (double& x : result.max_queue_hist) x /= window;

  result.sojourn_count = sojourn_count;
  result.mean_sojourn = sojourn_count > 0 ? sojourn_sum / static_cast<double>(sojourn_count) : 0.0;
  result.little_arrival_rate_x_sojourn =
      static_cast<double>(params.n) * params.lambda * result.mean_sojourn;
  result.little_time_avg_occupancy = total_occupancy_time / window;
  const double lhs = result.little_arrival_rate_x_sojourn;
  const double rhs = result.little_time_avg_occupancy;
  result.little_within_5pct =
      (lhs < 1e-9 && rhs < 1e-9) || std::abs(lhs - rhs) <= 0.05 * std::max(rhs, 1e-12);
  return result;
}

}  // namespace oslab
