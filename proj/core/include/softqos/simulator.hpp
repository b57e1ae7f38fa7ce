#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "softqos/admission.hpp"
#include "softqos/scenario.hpp"

namespace softqos {

enum class EventOutcome { Accepted, Blocked, Dropped, Departed };

/// One line of the event log. Arrivals carry the admission outcome;
/// departures are logged with outcome Departed and released = 0.
struct EventRecord {
  Tick time = 0.0;
  CallId call_id = 0;
  ClassId class_id = 0;
  CallKind kind = CallKind::New;
  EventOutcome outcome = EventOutcome::Accepted;
  Kbps released = 0.0;
  Kbps occupied_after = 0.0;
  Kbps free_after = 0.0;

  bool is_arrival() const noexcept { return outcome != EventOutcome::Departed; }
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventLog {
  std::vector<EventRecord> records;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// The first `n` requests of the repeating class pattern, arriving at ticks
/// 1..n. Kinds and holding times follow `spec`; `seed` is used only for
/// exponential holding.
std::vector<CallRequest> generate_paper_sequence(std::size_t n, const WorkloadSpec& spec = {},
                                                 std::uint64_t seed = 0);

/// Independent Poisson arrival streams per class, merged in time order and
/// truncated to spec.total_requests and spec.horizon.
std::vector<CallRequest> generate_stochastic(const WorkloadSpec& spec, std::uint64_t seed);

/// Dispatches on the scenario's workload variant.
std::vector<CallRequest> generate_workload(const Scenario& scenario);

/// Runs the scenario; throws ValidationError if it is invalid.
EventLog run(const Scenario& scenario);

/// Runs an explicit request list (sorted by arrival time) through the
/// scenario's cell and policy.
EventLog run_requests(const Scenario& scenario, const std::vector<CallRequest>& requests);

/// Applies one arrival under `policy`.
AdmissionResult admit(CellState cell, const CallRequest& request, Policy policy);

enum class SweepAxis { RequestedNewCalls, RequestedHandoffCalls };

struct SweepPoint {
  std::size_t n = 0;
  double rate = 0.0;
};

/// For each n, runs the workload prefix ending at the n-th request of the
/// axis kind and records the terminal blocked (new axis) or dropped
/// (handoff axis) rate. Points must be non-empty and strictly ascending.
/// Points run concurrently; results follow point order.
std::vector<SweepPoint> sweep(const Scenario& scenario, SweepAxis axis,
                              const std::vector<std::size_t>& points);

/// CSV with header time,call_id,class_id,kind,outcome,released,occupied_after,free_after.
std::string to_csv(const EventLog& log);
/// Throws ValidationError naming the offending line.
EventLog parse_event_log_csv(std::string_view text);
void write_event_log(const EventLog& log, const std::filesystem::path& path);

std::string_view to_string(EventOutcome outcome) noexcept;
std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_sweep_axis(std::string_view text);

}  // namespace softqos
