#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace twinsim {

enum class EventKind { ps_transition, query_issued, sync_completed };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::ps_transition;
  int ps = -1;                 // ps_transition
  int from = -1;
  int to = -1;
  std::vector<int> snapshot;   // query_issued / sync_completed: sampled joint state
  double query_time = 0.0;     // sync_completed: issue time of the matching query
};

// Timestamped record of one replication: PS transitions, twinning queries and
// completed synchronizations, plus the joint state at time 0 (to which the DT
// starts synchronized).
struct EventTrace {
  std::vector<int> initial_state;
  double horizon = 0.0;
  std::vector<Event> events;
};

// Number of queries issued by time t (inclusive) divided by t.
double empirical_twinning_rate(const EventTrace& trace, double t);

// One record per line: timestamp<TAB>event_kind<TAB>details, timestamps at 9
// decimal places. The initial state is emitted as a leading pseudo-record.
void dump_trace(const EventTrace& trace, std::ostream& out);

// View of the reconstructed mismatch state during trace playback.
struct PlaybackState {
  std::span<const int> s;
  std::span<const int> s_hat;
  std::span<const std::uint8_t> latch;
};

// Replays a trace, invoking `on_interval(t0, t1, state)` for every maximal
// interval on which the mismatch state is constant, up to `horizon`. Latch
// bits follow the transition-count rule: latch[i] is set iff system i has
// transitioned since the sample time of the last completed sync.
void replay_trace(const EventTrace& trace, double horizon,
                  const std::function<void(double, double, const PlaybackState&)>& on_interval);

}  // namespace twinsim
