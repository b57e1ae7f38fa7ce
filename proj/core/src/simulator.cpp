#include "softqos/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "softqos/error.hpp"
#include "softqos/metrics.hpp"
#include "text_util.hpp"

namespace softqos {

namespace {

constexpr std::string_view kEventLogHeader =
    "time,call_id,class_id,kind,outcome,released,occupied_after,free_after";

EventOutcome to_event_outcome(Outcome outcome) {
  switch (outcome) {
    case Outcome::Accepted:
      return EventOutcome::Accepted;
    case Outcome::Blocked:
      return EventOutcome::Blocked;
    case Outcome::Dropped:
      return EventOutcome::Dropped;
  }
  return EventOutcome::Blocked;
}

struct PendingDeparture {
  Tick time;
  std::uint64_t order;
  CallId call_id;
  ClassId class_id;
  CallKind kind;

  bool operator>(const PendingDeparture& other) const {
    return std::tie(time, order) > std::tie(other.time, other.order);
  }
};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

EventOutcome parse_event_outcome(std::string_view text) {
  for (auto v : {EventOutcome::Accepted, EventOutcome::Blocked, EventOutcome::Dropped,
                 EventOutcome::Departed}) {
    if (text == to_string(v)) {
      return v;
    }
  }
  throw ValidationError(fmt::format("unknown outcome '{}'", text));
}

// Number of requests needed so that the prefix holds `n` requests of `kind`.
std::size_t prefix_length(const std::vector<CallRequest>& requests, CallKind kind, std::size_t n) {
  if (n == 0) {
    return 0;
  }
  std::size_t seen = 0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i].kind == kind && ++seen == n) {
      return i + 1;
    }
  }
  throw ValidationError(fmt::format("points: the workload yields only {} {} requests, fewer than {}",
                                    seen, to_string(kind), n));
}

}  // namespace

AdmissionResult admit(CellState cell, const CallRequest& request, Policy policy) {
  switch (policy) {
    case Policy::SoftStrict:
      return soft_admit(std::move(cell), request, AdmissionMode::Strict);
    case Policy::SoftElastic:
      return soft_admit(std::move(cell), request, AdmissionMode::Elastic);
    case Policy::Hard:
      return hard_admit(std::move(cell), request);
  }
  throw PreconditionError("unknown policy");
}

EventLog run_requests(const Scenario& scenario, const std::vector<CallRequest>& requests) {
  CellState cell(scenario.capacity, scenario.classes);
  EventLog log;
  log.records.reserve(requests.size());
  std::priority_queue<PendingDeparture, std::vector<PendingDeparture>, std::greater<>> pending;
  std::uint64_t admitted = 0;

  auto record = [&](Tick time, CallId id, ClassId cls, CallKind kind, EventOutcome outcome,
                    Kbps released) {
    const Kbps occupied = occupied_bandwidth(cell);
    log.records.push_back(EventRecord{time, id, cls, kind, outcome, released, occupied,
                                      cell.capacity() - occupied});
  };

  // Departures at tick t are processed before arrivals at tick t.
  auto depart_until = [&](Tick until) {
    while (!pending.empty() && pending.top().time <= until) {
      const auto d = pending.top();
      pending.pop();
      cell = depart(std::move(cell), d.call_id, scenario.restore_policy);
      record(d.time, d.call_id, d.class_id, d.kind, EventOutcome::Departed, 0.0);
    }
  };

  Tick last = -kInfiniteTime;
  for (const auto& request : requests) {
    if (request.arrival_time < last) {
      throw PreconditionError(fmt::format("request {} arrives at {} before its predecessor at {}",
                                          request.call_id, request.arrival_time, last));
    }
    last = request.arrival_time;
    depart_until(request.arrival_time);

    auto result = admit(std::move(cell), request, scenario.policy);
    cell = std::move(result.cell);
    record(request.arrival_time, request.call_id, request.class_id, request.kind,
           to_event_outcome(result.decision.outcome), result.decision.released);

    if (result.decision.accepted()) {
      const Tick leaves = request.arrival_time + request.holding_time;
      if (std::isfinite(leaves)) {
        pending.push({leaves, admitted, request.call_id, request.class_id, request.kind});
      }
      ++admitted;
    }
  }
  depart_until(kInfiniteTime);
  return log;
}

EventLog run(const Scenario& scenario) {
  ensure_valid(scenario);
  return run_requests(scenario, generate_workload(scenario));
}

std::vector<SweepPoint> sweep(const Scenario& scenario, SweepAxis axis,
                              const std::vector<std::size_t>& points) {
  ensure_valid(scenario);
  if (points.empty()) {
    throw ValidationError("points: at least one point is required");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] <= points[i - 1]) {
      throw ValidationError(fmt::format("points: must be strictly ascending, got {} after {}",
                                        points[i], points[i - 1]));
    }
  }

  const CallKind kind = axis == SweepAxis::RequestedNewCalls ? CallKind::New : CallKind::Handoff;
  const std::size_t largest = points.back();
  const auto& w = scenario.workload;
  if (largest > 0 && !w.kind_pattern.can_produce(kind)) {
    throw ValidationError(
        fmt::format("points: the kind pattern never produces {} requests", to_string(kind)));
  }

  std::vector<CallRequest> requests;
  if (w.variant == WorkloadVariant::PaperSequence) {
    // The deterministic sequence is extended as far as the largest point needs.
    std::size_t total = 0;
    for (std::size_t seen = 0; seen < largest; ++total) {
      if (w.kind_pattern.kind_at(total) == kind) {
        ++seen;
      }
    }
    requests = generate_paper_sequence(total, w, scenario.seed.value_or(0));
  } else {
    requests = generate_workload(scenario);
  }

  std::vector<std::size_t> lengths;
  lengths.reserve(points.size());
  for (auto n : points) {
    lengths.push_back(prefix_length(requests, kind, n));
  }

  std::vector<SweepPoint> out(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < points.size(); i = next++) {
      const std::vector<CallRequest> prefix(requests.begin(),
                                            requests.begin() + static_cast<std::ptrdiff_t>(lengths[i]));
      const auto summary = summarize(run_requests(scenario, prefix));
      out[i] = SweepPoint{points[i], kind == CallKind::New ? summary.blocked_rate
                                                           : summary.dropped_rate};
    }
  };
  const auto threads = std::min<std::size_t>(
      points.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  pool.clear();
  return out;
}

std::string to_csv(const EventLog& log) {
  std::string out(kEventLogHeader);
  out += '\n';
  for (const auto& r : log.records) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", detail::format_double(r.time), r.call_id,
                       r.class_id, to_string(r.kind), to_string(r.outcome),
                       detail::format_double(r.released), detail::format_double(r.occupied_after),
                       detail::format_double(r.free_after));
  }
  return out;
}

EventLog parse_event_log_csv(std::string_view text) {
  EventLog log;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto end = text.find('\n');
    auto line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (!header_seen) {
      if (line != kEventLogHeader) {
        throw ValidationError(fmt::format("line 1: expected header '{}'", kEventLogHeader));
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    const auto where = fmt::format("line {}", line_no);
    if (fields.size() != 8) {
      throw ValidationError(fmt::format("{}: expected 8 fields, found {}", where, fields.size()));
    }
    try {
      EventRecord r;
      r.time = detail::parse_double(fields[0], "time");
      r.call_id = detail::parse_uint(fields[1], "call_id");
      r.class_id = static_cast<ClassId>(detail::parse_uint(fields[2], "class_id"));
      r.kind = parse_call_kind(fields[3]);
      r.outcome = parse_event_outcome(fields[4]);
      r.released = detail::parse_double(fields[5], "released");
      r.occupied_after = detail::parse_double(fields[6], "occupied_after");
      r.free_after = detail::parse_double(fields[7], "free_after");
      log.records.push_back(r);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: {}", where, e.what()));
    }
  }
  if (!header_seen) {
    throw ValidationError("event log is empty; a header row is required");
  }
  return log;
}

void write_event_log(const EventLog& log, const std::filesystem::path& path) {
  detail::write_file(path, to_csv(log));
}

std::string_view to_string(EventOutcome outcome) noexcept {
  switch (outcome) {
    case EventOutcome::Accepted:
      return "Accepted";
    case EventOutcome::Blocked:
      return "Blocked";
    case EventOutcome::Dropped:
      return "Dropped";
    case EventOutcome::Departed:
      return "Departed";
  }
  return "?";
}

std::string_view to_string(SweepAxis axis) noexcept {
  return axis == SweepAxis::RequestedNewCalls ? "RequestedNewCalls" : "RequestedHandoffCalls";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "new" || text == "RequestedNewCalls") {
    return SweepAxis::RequestedNewCalls;
  }
  if (text == "handoff" || text == "RequestedHandoffCalls") {
    return SweepAxis::RequestedHandoffCalls;
  }
  throw ValidationError(fmt::format("unknown sweep axis '{}' (expected new or handoff)", text));
}

}  // namespace softqos
