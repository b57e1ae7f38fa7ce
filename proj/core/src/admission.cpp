#include "softqos/admission.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "softqos/error.hpp"

namespace softqos {

struct CellAccess {
  static std::vector<ActiveCall>& calls(CellState& cell) { return cell.calls_; }
};

namespace {

double headroom(const CellState& cell, const ActiveCall& call, CallKind kind) {
  const TrafficClass& cls = cell.traffic_class(call.class_id);
  return cls.requested_bandwidth * std::max(call.ratio - cls.floor_for(kind), 0.0);
}

double deficit(const CellState& cell, const ActiveCall& call) {
  const TrafficClass& cls = cell.traffic_class(call.class_id);
  return cls.requested_bandwidth * std::max(1.0 - call.ratio, 0.0);
}

Outcome rejection_for(CallKind kind) {
  return kind == CallKind::Handoff ? Outcome::Dropped : Outcome::Blocked;
}

void add_call(CellState& cell, const CallRequest& request, double ratio) {
  auto& calls = CellAccess::calls(cell);
  if (cell.find_call(request.call_id) != nullptr) {
    throw PreconditionError(fmt::format("call {} is already active", request.call_id));
  }
  calls.push_back(ActiveCall{
      .call_id = request.call_id,
      .class_id = request.class_id,
      .ratio = ratio,
      .departure_time = request.arrival_time + request.holding_time,
  });
}

AdmissionResult reject(CellState cell, const CallRequest& request) {
  return {std::move(cell), AdmissionDecision{rejection_for(request.kind), 0.0, std::nullopt}};
}

}  // namespace

std::vector<std::string> validate_traffic_class(const TrafficClass& cls) {
  std::vector<std::string> out;
  const auto where = fmt::format("class {} ({})", cls.class_id, cls.name);
  if (cls.class_id <= 0) {
    out.push_back(fmt::format("{}: class_id must be positive", where));
  }
  if (!(cls.requested_bandwidth > 0.0) || !std::isfinite(cls.requested_bandwidth)) {
    out.push_back(fmt::format("{}: requested_bandwidth must be a positive finite value, got {}",
                              where, cls.requested_bandwidth));
  }
  if (!(cls.xi_min > 0.0 && cls.xi_min <= 1.0)) {
    out.push_back(fmt::format("{}: xi_min must lie in (0, 1], got {}", where, cls.xi_min));
  }
  if (!(cls.xi_min_new > 0.0 && cls.xi_min_new <= 1.0)) {
    out.push_back(fmt::format("{}: xi_min_new must lie in (0, 1], got {}", where, cls.xi_min_new));
  }
  if (cls.xi_min > cls.xi_min_new) {
    out.push_back(fmt::format("{}: xi_min ({}) must not exceed xi_min_new ({})", where, cls.xi_min,
                              cls.xi_min_new));
  }
  if (cls.conversational && (cls.xi_min != 1.0 || cls.xi_min_new != 1.0)) {
    out.push_back(fmt::format(
        "{}: conversational class requires xi_min = xi_min_new = 1, got {} and {}", where,
        cls.xi_min, cls.xi_min_new));
  }
  return out;
}

CellState::CellState(Kbps capacity, std::vector<TrafficClass> classes)
    : capacity_(capacity), classes_(std::move(classes)) {
  std::vector<std::string> problems;
  if (!(capacity_ > 0.0) || !std::isfinite(capacity_)) {
    problems.push_back(fmt::format("capacity must be a positive finite value, got {}", capacity_));
  }
  std::set<ClassId> seen;
  for (const auto& cls : classes_) {
    auto more = validate_traffic_class(cls);
    problems.insert(problems.end(), more.begin(), more.end());
    if (!seen.insert(cls.class_id).second) {
      problems.push_back(fmt::format("duplicate class_id {}", cls.class_id));
    }
  }
  if (!problems.empty()) {
    throw ValidationError(std::move(problems));
  }
}

CellState::CellState(Kbps capacity, std::vector<TrafficClass> classes,
                     std::vector<ActiveCall> calls)
    : CellState(capacity, std::move(classes)) {
  std::vector<std::string> problems;
  std::set<CallId> ids;
  for (const auto& call : calls) {
    const auto* cls = find_class(call.class_id);
    if (cls == nullptr) {
      problems.push_back(fmt::format("call {}: unknown class id {}", call.call_id, call.class_id));
      continue;
    }
    if (!ids.insert(call.call_id).second) {
      problems.push_back(fmt::format("call {}: duplicate call id", call.call_id));
    }
    if (!(call.ratio >= cls->xi_min && call.ratio <= 1.0)) {
      problems.push_back(fmt::format("call {}: ratio {} outside [{}, 1]", call.call_id, call.ratio,
                                     cls->xi_min));
    }
  }
  calls_ = std::move(calls);
  if (problems.empty() && occupied_bandwidth(*this) > capacity_ + kBandwidthTolerance) {
    problems.push_back(fmt::format("calls occupy {} kbps, more than the capacity {}",
                                   occupied_bandwidth(*this), capacity_));
  }
  if (!problems.empty()) {
    throw ValidationError(std::move(problems));
  }
}

const TrafficClass* CellState::find_class(ClassId id) const noexcept {
  auto it = std::find_if(classes_.begin(), classes_.end(),
                         [id](const TrafficClass& c) { return c.class_id == id; });
  return it == classes_.end() ? nullptr : &*it;
}

const TrafficClass& CellState::traffic_class(ClassId id) const {
  if (const auto* cls = find_class(id)) {
    return *cls;
  }
  throw NotFoundError(fmt::format("unknown class id {}", id));
}

const ActiveCall* CellState::find_call(CallId id) const noexcept {
  auto it = std::find_if(calls_.begin(), calls_.end(),
                         [id](const ActiveCall& c) { return c.call_id == id; });
  return it == calls_.end() ? nullptr : &*it;
}

Kbps CellState::allocation(const ActiveCall& call) const {
  return traffic_class(call.class_id).requested_bandwidth * call.ratio;
}

Kbps occupied_bandwidth(const CellState& cell) {
  Kbps total = 0.0;
  for (const auto& call : cell.calls()) {
    total += cell.allocation(call);
  }
  return total;
}

Kbps free_bandwidth(const CellState& cell) {
  return std::max(cell.capacity() - occupied_bandwidth(cell), 0.0);
}

Kbps releasable_bandwidth(const CellState& cell, CallKind kind) {
  Kbps total = 0.0;
  for (const auto& call : cell.calls()) {
    total += headroom(cell, call, kind);
  }
  return total;
}

AdmissionResult soft_admit(CellState cell, const CallRequest& request, AdmissionMode mode) {
  const TrafficClass& cls = cell.traffic_class(request.class_id);
  const Kbps need = cls.requested_bandwidth;
  // Unclamped, so a rounding overshoot from an earlier squeeze is paid back.
  const Kbps free = cell.capacity() - occupied_bandwidth(cell);

  if (free + kBandwidthTolerance >= need) {
    add_call(cell, request, 1.0);
    return {std::move(cell), AdmissionDecision{Outcome::Accepted, 0.0, 1.0}};
  }

  const Kbps releasable = releasable_bandwidth(cell, request.kind);
  const double floor = mode == AdmissionMode::Strict ? 1.0 : cls.floor_for(request.kind);
  if (free + releasable + kBandwidthTolerance < need * floor) {
    return reject(std::move(cell), request);
  }

  const Kbps amount = std::min(need - free, releasable);
  auto squeezed = degrade(std::move(cell), amount, request.kind);
  double ratio = 1.0;
  if (mode == AdmissionMode::Elastic) {
    ratio = std::clamp((free + squeezed.released) / need, floor, 1.0);
  }
  add_call(squeezed.cell, request, ratio);
  return {std::move(squeezed.cell), AdmissionDecision{Outcome::Accepted, squeezed.released, ratio}};
}

AdmissionResult hard_admit(CellState cell, const CallRequest& request) {
  const Kbps need = cell.traffic_class(request.class_id).requested_bandwidth;
  if (free_bandwidth(cell) + kBandwidthTolerance >= need) {
    add_call(cell, request, 1.0);
    return {std::move(cell), AdmissionDecision{Outcome::Accepted, 0.0, 1.0}};
  }
  return reject(std::move(cell), request);
}

DegradeResult degrade(CellState cell, Kbps amount, CallKind kind) {
  if (!(amount >= 0.0)) {
    throw PreconditionError(fmt::format("degrade amount must be non-negative, got {}", amount));
  }
  const Kbps total_headroom = releasable_bandwidth(cell, kind);
  if (amount > total_headroom + kBandwidthTolerance) {
    throw PreconditionError(fmt::format(
        "degrade amount {} exceeds releasable bandwidth {}", amount, total_headroom));
  }
  if (amount == 0.0 || total_headroom <= 0.0) {
    return {std::move(cell), 0.0};
  }

  const bool to_floor = amount >= total_headroom;
  Kbps released = 0.0;
  for (auto& call : CellAccess::calls(cell)) {
    const TrafficClass& cls = cell.traffic_class(call.class_id);
    const double floor = cls.floor_for(kind);
    const double h = headroom(cell, call, kind);
    if (h <= 0.0) {
      continue;
    }
    const double before = call.ratio;
    if (to_floor) {
      call.ratio = floor;
    } else {
      const Kbps share = amount * (h / total_headroom);
      call.ratio = std::max(before - share / cls.requested_bandwidth, floor);
    }
    released += cls.requested_bandwidth * (before - call.ratio);
  }
  return {std::move(cell), released};
}

RestoreResult restore(CellState cell, Kbps amount) {
  if (!(amount >= 0.0)) {
    throw PreconditionError(fmt::format("restore amount must be non-negative, got {}", amount));
  }
  Kbps budget = std::min(amount, free_bandwidth(cell));
  Kbps granted = 0.0;
  auto& calls = CellAccess::calls(cell);

  while (budget > kBandwidthTolerance) {
    Kbps total_deficit = 0.0;
    for (const auto& call : calls) {
      total_deficit += deficit(cell, call);
    }
    if (total_deficit <= 0.0) {
      break;
    }
    Kbps round = 0.0;
    for (auto& call : calls) {
      const Kbps d = deficit(cell, call);
      if (d <= 0.0) {
        continue;
      }
      const TrafficClass& cls = cell.traffic_class(call.class_id);
      const Kbps share = std::min(d, budget * (d / total_deficit));
      const double before = call.ratio;
      call.ratio = share >= d ? 1.0 : std::min(before + share / cls.requested_bandwidth, 1.0);
      round += cls.requested_bandwidth * (call.ratio - before);
    }
    if (round <= 0.0) {
      break;
    }
    granted += round;
    budget -= round;
  }
  return {std::move(cell), granted};
}

CellState depart(CellState cell, CallId call_id, RestorePolicy policy) {
  auto& calls = CellAccess::calls(cell);
  auto it = std::find_if(calls.begin(), calls.end(),
                         [call_id](const ActiveCall& c) { return c.call_id == call_id; });
  if (it == calls.end()) {
    throw NotFoundError(fmt::format("unknown call id {}", call_id));
  }
  const Kbps freed = cell.allocation(*it);
  calls.erase(it);
  if (policy == RestorePolicy::RestoreOnDepart) {
    return restore(std::move(cell), freed).cell;
  }
  return cell;
}

std::string_view to_string(CallKind kind) noexcept {
  return kind == CallKind::New ? "New" : "Handoff";
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::Accepted:
      return "Accepted";
    case Outcome::Blocked:
      return "Blocked";
    case Outcome::Dropped:
      return "Dropped";
  }
  return "?";
}

std::string_view to_string(AdmissionMode mode) noexcept {
  return mode == AdmissionMode::Strict ? "Strict" : "Elastic";
}

std::string_view to_string(RestorePolicy policy) noexcept {
  return policy == RestorePolicy::RestoreOnDepart ? "RestoreOnDepart" : "NoRestore";
}

}  // namespace softqos
