#include "softqos/metrics.hpp"

#include <fmt/format.h>

#include "softqos/error.hpp"
#include "text_util.hpp"

namespace softqos {

namespace {

constexpr std::string_view kCurvesHeader = "n,kind,rate";

double rate(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::string_view curve_kind(CallKind kind) {
  return kind == CallKind::New ? "new" : "handoff";
}

void check(const EventRecord& r, std::size_t index) {
  if ((r.outcome == EventOutcome::Blocked && r.kind != CallKind::New) ||
      (r.outcome == EventOutcome::Dropped && r.kind != CallKind::Handoff)) {
    throw ValidationError(fmt::format("record {} (call {}): outcome {} is impossible for a {} call",
                                      index, r.call_id, to_string(r.outcome), to_string(r.kind)));
  }
}

}  // namespace

RateSummary summarize(const EventLog& log) {
  RateSummary s;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    check(r, i);
    if (!r.is_arrival()) {
      continue;
    }
    if (r.kind == CallKind::New) {
      ++s.requested_new;
      s.blocked_new += r.outcome == EventOutcome::Blocked ? 1 : 0;
    } else {
      ++s.requested_handoff;
      s.dropped_handoff += r.outcome == EventOutcome::Dropped ? 1 : 0;
    }
  }
  s.blocked_rate = rate(s.blocked_new, s.requested_new);
  s.dropped_rate = rate(s.dropped_handoff, s.requested_handoff);
  return s;
}

std::vector<CurveRow> prefix_curves(const EventLog& log) {
  std::vector<CurveRow> blocked;
  std::vector<CurveRow> dropped;
  std::size_t n_new = 0, n_blocked = 0, n_handoff = 0, n_dropped = 0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    check(r, i);
    if (!r.is_arrival()) {
      continue;
    }
    if (r.kind == CallKind::New) {
      ++n_new;
      n_blocked += r.outcome == EventOutcome::Blocked ? 1 : 0;
      blocked.push_back({n_new, CallKind::New, rate(n_blocked, n_new)});
    } else {
      ++n_handoff;
      n_dropped += r.outcome == EventOutcome::Dropped ? 1 : 0;
      dropped.push_back({n_handoff, CallKind::Handoff, rate(n_dropped, n_handoff)});
    }
  }
  blocked.insert(blocked.end(), dropped.begin(), dropped.end());
  return blocked;
}

std::string curves_to_csv(std::span<const CurveRow> rows) {
  std::string out(kCurvesHeader);
  out += '\n';
  for (const auto& row : rows) {
    out += fmt::format("{},{},{}\n", row.n, curve_kind(row.kind), detail::format_double(row.rate));
  }
  return out;
}

std::vector<CurveRow> parse_curves_csv(std::string_view text) {
  std::vector<CurveRow> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    auto line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (line_no == 1) {
      if (line != kCurvesHeader) {
        throw ValidationError(fmt::format("line 1: expected header '{}'", kCurvesHeader));
      }
      continue;
    }
    if (line.empty()) {
      continue;
    }
    const auto first = line.find(',');
    const auto second = first == std::string_view::npos ? first : line.find(',', first + 1);
    if (second == std::string_view::npos || line.find(',', second + 1) != std::string_view::npos) {
      throw ValidationError(fmt::format("line {}: expected 3 fields", line_no));
    }
    const auto kind = line.substr(first + 1, second - first - 1);
    if (kind != "new" && kind != "handoff") {
      throw ValidationError(fmt::format("line {}: unknown kind '{}'", line_no, kind));
    }
    rows.push_back(CurveRow{
        detail::parse_uint(line.substr(0, first), fmt::format("line {}: n", line_no)),
        kind == "new" ? CallKind::New : CallKind::Handoff,
        detail::parse_double(line.substr(second + 1), fmt::format("line {}: rate", line_no)),
    });
  }
  if (line_no == 0) {
    throw ValidationError("curves CSV is empty; a header row is required");
  }
  return rows;
}

std::string format_summary(const RateSummary& s, std::string_view label) {
  std::string out;
  if (!label.empty()) {
    out += fmt::format("scenario:          {}\n", label);
  }
  out += fmt::format("requested new:     {}\n", s.requested_new);
  out += fmt::format("blocked new:       {}\n", s.blocked_new);
  out += fmt::format("blocked call rate: {}\n", detail::format_double(s.blocked_rate));
  out += fmt::format("requested handoff: {}\n", s.requested_handoff);
  out += fmt::format("dropped handoff:   {}\n", s.dropped_handoff);
  out += fmt::format("dropped call rate: {}\n", detail::format_double(s.dropped_rate));
  return out;
}

void write_report(const RateSummary& summary, std::span<const CurveRow> curves,
                  const std::filesystem::path& directory, std::string_view label) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create '{}': {}", directory.string(), ec.message()));
  }
  detail::write_file(directory / "summary.txt", format_summary(summary, label));
  detail::write_file(directory / "curves.csv", curves_to_csv(curves));
}

}  // namespace softqos
