#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "softqos/simulator.hpp"

namespace softqos {

/// Blocked rate = blocked new / requested new; dropped rate = dropped
/// handoff / requested handoff. Both are 0 when nothing was requested.
struct RateSummary {
  std::size_t requested_new = 0;
  std::size_t blocked_new = 0;
  std::size_t requested_handoff = 0;
  std::size_t dropped_handoff = 0;
  double blocked_rate = 0.0;
  double dropped_rate = 0.0;

  friend bool operator==(const RateSummary&, const RateSummary&) = default;
};

/// Throws ValidationError on a record that cannot occur (a Blocked handoff
/// or a Dropped new call).
RateSummary summarize(const EventLog& log);

/// Running rate after the n-th request of `kind`.
struct CurveRow {
  std::size_t n = 0;
  CallKind kind = CallKind::New;
  double rate = 0.0;

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

/// New-call rows (blocked rate) first, then handoff rows (dropped rate).
std::vector<CurveRow> prefix_curves(const EventLog& log);

/// CSV with header `n,kind,rate`; kind is "new" or "handoff".
std::string curves_to_csv(std::span<const CurveRow> rows);
std::vector<CurveRow> parse_curves_csv(std::string_view text);

std::string format_summary(const RateSummary& summary, std::string_view label = {});

/// Writes summary.txt and curves.csv into `directory` (created if needed).
/// Throws IoError.
void write_report(const RateSummary& summary, std::span<const CurveRow> curves,
                  const std::filesystem::path& directory, std::string_view label = {});

}  // namespace softqos
