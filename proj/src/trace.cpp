#include "twinsim/trace.hpp"

#include <cstdio>
#include <deque>
#include <ostream>
#include <stdexcept>

#include "twinsim/errors.hpp"

namespace twinsim {

double empirical_twinning_rate(const EventTrace& trace, double t) {
  if (t <= 0.0) throw Error("empirical_twinning_rate: t must be > 0");
  if (t > trace.horizon) throw Error("empirical_twinning_rate: t exceeds trace horizon");
  std::uint64_t count = 0;
  for (const auto& e : trace.events) {
    if (e.time > t) break;
    if (e.kind == EventKind::query_issued) ++count;
  }
  return static_cast<double>(count) / t;
}

namespace {

void write_state(std::ostream& out, std::span<const int> s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out << ',';
    out << s[i];
  }
}

void write_time(std::ostream& out, double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", t);
  out << buf;
}

}  // namespace

void dump_trace(const EventTrace& trace, std::ostream& out) {
  write_time(out, 0.0);
  out << "\tinitial\tstate=";
  write_state(out, trace.initial_state);
  out << '\n';
  for (const auto& e : trace.events) {
    write_time(out, e.time);
    switch (e.kind) {
      case EventKind::ps_transition:
        out << "\tps_transition\tps=" << e.ps << " from=" << e.from << " to=" << e.to;
        break;
      case EventKind::query_issued:
        out << "\tquery_issued\tstate=";
        write_state(out, e.snapshot);
        break;
      case EventKind::sync_completed:
        out << "\tsync_completed\tstate=";
        write_state(out, e.snapshot);
        out << " query_time=";
        write_time(out, e.query_time);
        break;
    }
    out << '\n';
  }
}

void replay_trace(const EventTrace& trace, double horizon,
                  const std::function<void(double, double, const PlaybackState&)>& on_interval) {
  if (trace.initial_state.empty()) throw EmptyTrace("trace has no initial state");
  if (horizon <= 0.0) throw InvalidHorizon("replay horizon must be > 0");
  if (horizon > trace.horizon) throw EmptyTrace("trace does not cover the requested horizon");

  const std::size_t k = trace.initial_state.size();
  std::vector<int> s = trace.initial_state;
  std::vector<int> s_hat = trace.initial_state;
  std::vector<std::uint8_t> latch(k, 0);
  std::vector<std::uint64_t> counts(k, 0);

  // Transition counts recorded at each in-flight query, matched by issue time
  // when the sync completes. Preempted queries are dropped as completions of
  // later queries pass them by.
  struct InFlight {
    double query_time;
    std::vector<std::uint64_t> counts;
  };
  std::deque<InFlight> in_flight;

  const PlaybackState view{s, s_hat, latch};
  double now = 0.0;
  for (const auto& e : trace.events) {
    if (e.time > horizon) break;
    if (e.time > now) {
      on_interval(now, e.time, view);
      now = e.time;
    }
    switch (e.kind) {
      case EventKind::ps_transition:
        s[e.ps] = e.to;
        ++counts[e.ps];
        latch[e.ps] = 1;
        break;
      case EventKind::query_issued:
        in_flight.push_back({e.time, counts});
        break;
      case EventKind::sync_completed: {
        while (!in_flight.empty() && in_flight.front().query_time < e.query_time) {
          in_flight.pop_front();
        }
        if (in_flight.empty() || in_flight.front().query_time != e.query_time) {
          throw EmptyTrace("sync_completed without matching query_issued");
        }
        for (std::size_t i = 0; i < k; ++i) {
          s_hat[i] = e.snapshot[i];
          latch[i] = counts[i] > in_flight.front().counts[i] ? 1 : 0;
        }
        in_flight.pop_front();
        break;
      }
    }
  }
  if (now < horizon) on_interval(now, horizon, view);
}

}  // namespace twinsim
