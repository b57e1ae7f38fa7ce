#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "softqos/admission.hpp"

namespace softqos {

enum class Policy { SoftStrict, SoftElastic, Hard };
enum class WorkloadVariant { PaperSequence, Stochastic };

/// Assigns New/Handoff to the i-th request (0-based).
struct KindPattern {
  enum class Type { AllNew, AllHandoff, Ratio, Explicit };

  Type type = Type::AllNew;
  /// Ratio: fraction of requests tagged Handoff, spread evenly.
  double handoff_fraction = 0.0;
  /// Explicit: cycled when shorter than the request count.
  std::vector<CallKind> kinds;

  CallKind kind_at(std::size_t index) const;
  /// False when the pattern never produces `kind`.
  bool can_produce(CallKind kind) const;
};

struct HoldingSpec {
  enum class Type { Infinite, Fixed, Exponential };

  Type type = Type::Infinite;
  /// Fixed: the holding time. Exponential: the mean.
  Tick ticks = 0.0;

  bool is_random() const noexcept { return type == Type::Exponential; }
};

struct ClassRate {
  ClassId class_id = 0;
  double rate = 0.0;  // arrivals per tick
};

/// Class ids cycled by the reference workload: Voice, Web, Background,
/// Voice, Video, Web, Voice, Background under standard_classes() numbering.
inline const std::vector<ClassId> kPaperSequencePattern{1, 3, 4, 1, 2, 3, 1, 4};

struct WorkloadSpec {
  WorkloadVariant variant = WorkloadVariant::PaperSequence;
  std::size_t total_requests = 0;
  std::vector<ClassId> sequence_pattern = kPaperSequencePattern;
  KindPattern kind_pattern;
  HoldingSpec holding;
  std::vector<ClassRate> rates;  // Stochastic only
  std::optional<Tick> horizon;   // Stochastic only; unbounded when absent
};

struct Scenario {
  std::string label;
  Kbps capacity = 0.0;
  std::vector<TrafficClass> classes;
  WorkloadSpec workload;
  Policy policy = Policy::SoftStrict;
  RestorePolicy restore_policy = RestorePolicy::RestoreOnDepart;
  std::optional<std::uint64_t> seed;

  /// True when generating the workload consumes random numbers.
  bool needs_seed() const noexcept;
};

/// The four reference classes: 1 Conversational Voice (16 kbps, floors 1/1),
/// 2 Streaming Video (32, 0.7/0.8), 3 Interactive Web browsing (10, 0.7/0.8),
/// 4 Background (25, 0.4/0.6).
std::vector<TrafficClass> standard_classes();

/// Every invariant violation in `scenario`, empty when valid.
std::vector<std::string> validate_scenario(const Scenario& scenario);

/// Throws ValidationError listing every violation.
void ensure_valid(const Scenario& scenario);

/// Parses a scenario document (JSON, schema_version 1). Only the schema is
/// checked here; call validate_scenario for the invariants.
Scenario parse_scenario(std::string_view document);
Scenario load_scenario_file(const std::filesystem::path& path);

/// A shipped scenario by name (e.g. "table2_default"); nullopt if unknown.
std::optional<Scenario> builtin_scenario(std::string_view name);

std::string scenario_to_json(const Scenario& scenario);

std::string_view to_string(Policy policy) noexcept;
std::string_view to_string(WorkloadVariant variant) noexcept;

/// Accepts "SoftStrict"/"soft-strict" style spellings, case-insensitive.
Policy parse_policy(std::string_view text);
CallKind parse_call_kind(std::string_view text);

}  // namespace softqos
