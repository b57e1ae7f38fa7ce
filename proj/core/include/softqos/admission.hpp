#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace softqos {

using Kbps = double;
using Tick = double;
using CallId = std::uint64_t;
using ClassId = int;

inline constexpr Tick kInfiniteTime = std::numeric_limits<Tick>::infinity();

/// Absolute tolerance for every bandwidth comparison.
inline constexpr Kbps kBandwidthTolerance = 1e-9;

enum class CallKind { New, Handoff };
enum class Outcome { Accepted, Blocked, Dropped };
enum class AdmissionMode { Strict, Elastic };
enum class RestorePolicy { RestoreOnDepart, NoRestore };

/// A service class. `xi_min` is the floor a call may be squeezed to when a
/// handoff call is admitted; `xi_min_new` is the (higher) floor used when a
/// new call is admitted.
struct TrafficClass {
  ClassId class_id = 0;
  std::string name;
  Kbps requested_bandwidth = 0.0;
  double xi_min = 1.0;
  double xi_min_new = 1.0;
  bool conversational = false;

  double floor_for(CallKind kind) const noexcept {
    return kind == CallKind::Handoff ? xi_min : xi_min_new;
  }
};

/// Invariant violations for one class, empty when valid.
std::vector<std::string> validate_traffic_class(const TrafficClass& cls);

struct CallRequest {
  CallId call_id = 0;
  ClassId class_id = 0;
  CallKind kind = CallKind::New;
  Tick arrival_time = 0.0;
  Tick holding_time = kInfiniteTime;
};

struct ActiveCall {
  CallId call_id = 0;
  ClassId class_id = 0;
  double ratio = 1.0;
  Tick departure_time = kInfiniteTime;
};

/// One cell: a fixed capacity, a class table and the calls it carries.
///
/// Transformations are free functions below that take a CellState by value
/// and return the successor state, so callers can keep or discard history
/// as they like.
class CellState {
 public:
  /// Throws ValidationError if the capacity or the class table is invalid.
  CellState(Kbps capacity, std::vector<TrafficClass> classes);

  /// A cell already carrying `calls`. Throws ValidationError if a call
  /// names an unknown class, repeats an id, sits outside [xi_min, 1] or the
  /// calls exceed the capacity.
  CellState(Kbps capacity, std::vector<TrafficClass> classes, std::vector<ActiveCall> calls);

  Kbps capacity() const noexcept { return capacity_; }
  std::span<const TrafficClass> classes() const noexcept { return classes_; }
  std::span<const ActiveCall> calls() const noexcept { return calls_; }

  /// Throws NotFoundError for an unknown id.
  const TrafficClass& traffic_class(ClassId id) const;
  const TrafficClass* find_class(ClassId id) const noexcept;
  const ActiveCall* find_call(CallId id) const noexcept;

  /// Bandwidth currently held by `call`.
  Kbps allocation(const ActiveCall& call) const;

 private:
  friend struct CellAccess;

  Kbps capacity_;
  std::vector<TrafficClass> classes_;
  std::vector<ActiveCall> calls_;
};

struct AdmissionDecision {
  Outcome outcome = Outcome::Blocked;
  Kbps released = 0.0;
  std::optional<double> ratio_granted;

  bool accepted() const noexcept { return outcome == Outcome::Accepted; }
};

struct AdmissionResult {
  CellState cell;
  AdmissionDecision decision;
};

struct DegradeResult {
  CellState cell;
  Kbps released;
};

struct RestoreResult {
  CellState cell;
  Kbps granted;
};

/// Sum of requested bandwidth times current ratio over all calls.
Kbps occupied_bandwidth(const CellState& cell);

Kbps free_bandwidth(const CellState& cell);

/// Bandwidth recoverable by squeezing every call down to the floor that
/// applies to an incoming call of `kind`. Calls already below that floor
/// contribute nothing.
Kbps releasable_bandwidth(const CellState& cell, CallKind kind);

/// Soft-QoS admission. Strict admits at the full requested bandwidth only;
/// Elastic admits at any ratio down to the incoming class's floor.
AdmissionResult soft_admit(CellState cell, const CallRequest& request,
                           AdmissionMode mode = AdmissionMode::Strict);

/// Hard-QoS admission: full bandwidth from free capacity or reject.
AdmissionResult hard_admit(CellState cell, const CallRequest& request);

/// Releases `amount` from existing calls in proportion to each call's
/// headroom above the floor for `kind`. Throws PreconditionError if
/// `amount` is negative or exceeds releasable_bandwidth(cell, kind).
DegradeResult degrade(CellState cell, Kbps amount, CallKind kind);

/// Water-fills up to `amount` (capped by free capacity) back into degraded
/// calls in proportion to their deficit below ratio 1.
RestoreResult restore(CellState cell, Kbps amount);

/// Removes a call; under RestoreOnDepart its bandwidth is restored to
/// degraded calls. Throws NotFoundError for an unknown id.
CellState depart(CellState cell, CallId call_id, RestorePolicy policy);

std::string_view to_string(CallKind kind) noexcept;
std::string_view to_string(Outcome outcome) noexcept;
std::string_view to_string(AdmissionMode mode) noexcept;
std::string_view to_string(RestorePolicy policy) noexcept;

}  // namespace softqos
