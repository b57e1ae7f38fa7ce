#include "softqos/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "json_reader.hpp"
#include "softqos/embedded_data.hpp"
#include "softqos/error.hpp"
#include "text_util.hpp"

namespace softqos {

using nlohmann::json;

namespace {

constexpr int kScenarioSchemaVersion = 1;

std::string_view to_string(KindPattern::Type type) noexcept {
  switch (type) {
    case KindPattern::Type::AllNew:
      return "AllNew";
    case KindPattern::Type::AllHandoff:
      return "AllHandoff";
    case KindPattern::Type::Ratio:
      return "Ratio";
    case KindPattern::Type::Explicit:
      return "Explicit";
  }
  return "?";
}

std::string_view to_string(HoldingSpec::Type type) noexcept {
  switch (type) {
    case HoldingSpec::Type::Infinite:
      return "Infinite";
    case HoldingSpec::Type::Fixed:
      return "Fixed";
    case HoldingSpec::Type::Exponential:
      return "Exponential";
  }
  return "?";
}

// Matches "SoftStrict", "soft-strict", "soft_strict" and the like.
bool loosely_equals(std::string_view text, std::string_view name) {
  std::string squashed;
  for (char c : text) {
    if (c != '-' && c != '_') {
      squashed.push_back(c);
    }
  }
  return detail::iequals(squashed, name);
}

template <typename Enum, std::size_t N>
Enum parse_named(std::string_view text, const std::array<Enum, N>& values, std::string_view what) {
  for (Enum v : values) {
    if (loosely_equals(text, to_string(v))) {
      return v;
    }
  }
  throw ValidationError(fmt::format("unknown {} '{}'", what, text));
}

std::optional<std::string> read_string(detail::JsonReader& r, const json& obj,
                                       std::string_view where, const char* key) {
  if (const auto* v = r.field(obj, where, key, json::value_t::string)) {
    return v->get<std::string>();
  }
  return std::nullopt;
}

TrafficClass read_class(detail::JsonReader& r, const json& node, std::size_t index) {
  const auto where = fmt::format("classes[{}]", index);
  TrafficClass cls;
  if (!node.is_object()) {
    r.problems.push_back(fmt::format("{}: expected an object", where));
    return cls;
  }
  r.only_keys(node, where,
              {"class_id", "name", "requested_bandwidth", "xi_min", "xi_min_new", "conversational"});
  if (const auto* v = r.field(node, where, "class_id", json::value_t::number_integer)) {
    cls.class_id = v->get<int>();
  }
  if (auto v = read_string(r, node, where, "name")) {
    cls.name = *v;
  }
  cls.requested_bandwidth = r.number(node, where, "requested_bandwidth").value_or(0.0);
  cls.xi_min = r.number(node, where, "xi_min").value_or(0.0);
  cls.xi_min_new = r.number(node, where, "xi_min_new").value_or(0.0);
  if (node.contains("conversational")) {
    if (const auto* v = r.field(node, where, "conversational", json::value_t::boolean)) {
      cls.conversational = v->get<bool>();
    }
  }
  return cls;
}

KindPattern read_kind_pattern(detail::JsonReader& r, const json& node) {
  constexpr std::string_view where = "workload.kind_pattern";
  KindPattern pattern;
  if (!node.is_object()) {
    r.problems.push_back(fmt::format("{}: expected an object", where));
    return pattern;
  }
  r.only_keys(node, where, {"type", "handoff_fraction", "kinds"});
  auto type = read_string(r, node, where, "type");
  if (!type) {
    return pattern;
  }
  auto parsed = r.guarded(where, [&] {
    return parse_named(*type,
                       std::array{KindPattern::Type::AllNew, KindPattern::Type::AllHandoff,
                                  KindPattern::Type::Ratio, KindPattern::Type::Explicit},
                       "kind pattern");
  });
  if (!parsed) {
    return pattern;
  }
  pattern.type = *parsed;
  if (pattern.type == KindPattern::Type::Ratio) {
    pattern.handoff_fraction = r.number(node, where, "handoff_fraction").value_or(0.0);
  } else if (pattern.type == KindPattern::Type::Explicit) {
    if (const auto* kinds = r.field(node, where, "kinds", json::value_t::array)) {
      for (const auto& k : *kinds) {
        if (!k.is_string()) {
          r.problems.push_back(fmt::format("{}: kinds entries must be strings", where));
          continue;
        }
        if (auto kind = r.guarded(where, [&] { return parse_call_kind(k.get<std::string>()); })) {
          pattern.kinds.push_back(*kind);
        }
      }
    }
  }
  return pattern;
}

HoldingSpec read_holding(detail::JsonReader& r, const json& node) {
  constexpr std::string_view where = "workload.holding";
  HoldingSpec holding;
  if (!node.is_object()) {
    r.problems.push_back(fmt::format("{}: expected an object", where));
    return holding;
  }
  r.only_keys(node, where, {"type", "ticks", "mean"});
  auto type = read_string(r, node, where, "type");
  if (!type) {
    return holding;
  }
  auto parsed = r.guarded(where, [&] {
    return parse_named(*type,
                       std::array{HoldingSpec::Type::Infinite, HoldingSpec::Type::Fixed,
                                  HoldingSpec::Type::Exponential},
                       "holding type");
  });
  if (!parsed) {
    return holding;
  }
  holding.type = *parsed;
  if (holding.type == HoldingSpec::Type::Fixed) {
    holding.ticks = r.number(node, where, "ticks").value_or(0.0);
  } else if (holding.type == HoldingSpec::Type::Exponential) {
    holding.ticks = r.number(node, where, "mean").value_or(0.0);
  }
  return holding;
}

WorkloadSpec read_workload(detail::JsonReader& r, const json& node) {
  constexpr std::string_view where = "workload";
  WorkloadSpec spec;
  if (!node.is_object()) {
    r.problems.push_back(fmt::format("{}: expected an object", where));
    return spec;
  }
  r.only_keys(node, where,
              {"variant", "total_requests", "sequence_pattern", "kind_pattern", "holding", "rates",
               "horizon"});
  if (auto v = read_string(r, node, where, "variant")) {
    if (auto variant = r.guarded(where, [&] {
          return parse_named(
              *v, std::array{WorkloadVariant::PaperSequence, WorkloadVariant::Stochastic},
              "workload variant");
        })) {
      spec.variant = *variant;
    }
  }
  spec.total_requests = r.count(node, where, "total_requests").value_or(0);
  if (node.contains("sequence_pattern")) {
    spec.sequence_pattern.clear();
    if (const auto* list = r.field(node, where, "sequence_pattern", json::value_t::array)) {
      for (const auto& id : *list) {
        if (!id.is_number_integer()) {
          r.problems.push_back(fmt::format("{}: sequence_pattern entries must be class ids", where));
          continue;
        }
        spec.sequence_pattern.push_back(id.get<int>());
      }
    }
  }
  if (node.contains("kind_pattern")) {
    spec.kind_pattern = read_kind_pattern(r, node.at("kind_pattern"));
  }
  if (node.contains("holding")) {
    spec.holding = read_holding(r, node.at("holding"));
  }
  if (node.contains("rates")) {
    if (const auto* list = r.field(node, where, "rates", json::value_t::array)) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const auto& entry = (*list)[i];
        const auto at = fmt::format("workload.rates[{}]", i);
        if (!entry.is_object()) {
          r.problems.push_back(fmt::format("{}: expected an object", at));
          continue;
        }
        r.only_keys(entry, at, {"class_id", "rate"});
        ClassRate rate;
        if (const auto* id = r.field(entry, at, "class_id", json::value_t::number_integer)) {
          rate.class_id = id->get<int>();
        }
        rate.rate = r.number(entry, at, "rate").value_or(0.0);
        spec.rates.push_back(rate);
      }
    }
  }
  if (node.contains("horizon")) {
    spec.horizon = r.number(node, where, "horizon");
  }
  return spec;
}

}  // namespace

CallKind KindPattern::kind_at(std::size_t index) const {
  switch (type) {
    case Type::AllNew:
      return CallKind::New;
    case Type::AllHandoff:
      return CallKind::Handoff;
    case Type::Ratio: {
      // Handoff whenever the running count floor((i + 1) * p) steps up.
      const auto before = std::floor(static_cast<double>(index) * handoff_fraction);
      const auto after = std::floor(static_cast<double>(index + 1) * handoff_fraction);
      return after > before ? CallKind::Handoff : CallKind::New;
    }
    case Type::Explicit:
      if (kinds.empty()) {
        throw PreconditionError("explicit kind pattern has no entries");
      }
      return kinds[index % kinds.size()];
  }
  return CallKind::New;
}

bool KindPattern::can_produce(CallKind kind) const {
  switch (type) {
    case Type::AllNew:
      return kind == CallKind::New;
    case Type::AllHandoff:
      return kind == CallKind::Handoff;
    case Type::Ratio:
      return kind == CallKind::Handoff ? handoff_fraction > 0.0 : handoff_fraction < 1.0;
    case Type::Explicit:
      return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
  }
  return false;
}

bool Scenario::needs_seed() const noexcept {
  return workload.variant == WorkloadVariant::Stochastic || workload.holding.is_random();
}

std::vector<TrafficClass> standard_classes() {
  return {
      {1, "Conversational Voice", 16.0, 1.0, 1.0, true},
      {2, "Streaming Video", 32.0, 0.7, 0.8, false},
      {3, "Interactive Web browsing", 10.0, 0.7, 0.8, false},
      {4, "Background", 25.0, 0.4, 0.6, false},
  };
}

std::vector<std::string> validate_scenario(const Scenario& scenario) {
  std::vector<std::string> out;
  if (!(scenario.capacity > 0.0) || !std::isfinite(scenario.capacity)) {
    out.push_back(fmt::format("capacity: must be a positive finite value, got {}", scenario.capacity));
  }
  if (scenario.classes.empty()) {
    out.push_back("classes: the class table must not be empty");
  }
  std::set<ClassId> ids;
  for (const auto& cls : scenario.classes) {
    for (auto& problem : validate_traffic_class(cls)) {
      out.push_back(fmt::format("classes: {}", problem));
    }
    if (!ids.insert(cls.class_id).second) {
      out.push_back(fmt::format("classes: duplicate class_id {}", cls.class_id));
    }
  }

  const auto& w = scenario.workload;
  if (w.variant == WorkloadVariant::PaperSequence) {
    if (w.sequence_pattern.empty()) {
      out.push_back("workload.sequence_pattern: must not be empty");
    }
    for (auto id : w.sequence_pattern) {
      if (!ids.contains(id)) {
        out.push_back(fmt::format("workload.sequence_pattern: unknown class id {}", id));
      }
    }
    if (!w.rates.empty()) {
      out.push_back("workload.rates: only allowed for the Stochastic variant");
    }
    if (w.horizon) {
      out.push_back("workload.horizon: only allowed for the Stochastic variant");
    }
  } else {
    if (w.rates.empty()) {
      out.push_back("workload.rates: the Stochastic variant needs at least one class rate");
    }
    std::set<ClassId> rated;
    for (const auto& r : w.rates) {
      if (!ids.contains(r.class_id)) {
        out.push_back(fmt::format("workload.rates: unknown class id {}", r.class_id));
      }
      if (!rated.insert(r.class_id).second) {
        out.push_back(fmt::format("workload.rates: class {} listed twice", r.class_id));
      }
      if (!(r.rate > 0.0) || !std::isfinite(r.rate)) {
        out.push_back(fmt::format("workload.rates: rate for class {} must be positive, got {}",
                                  r.class_id, r.rate));
      }
    }
    if (w.horizon && !(*w.horizon > 0.0)) {
      out.push_back(fmt::format("workload.horizon: must be positive, got {}", *w.horizon));
    }
  }

  const auto& kp = w.kind_pattern;
  if (kp.type == KindPattern::Type::Ratio &&
      !(kp.handoff_fraction >= 0.0 && kp.handoff_fraction <= 1.0)) {
    out.push_back(fmt::format("workload.kind_pattern.handoff_fraction: must lie in [0, 1], got {}",
                              kp.handoff_fraction));
  }
  if (kp.type == KindPattern::Type::Explicit && kp.kinds.empty()) {
    out.push_back("workload.kind_pattern.kinds: must not be empty");
  }

  const auto& h = w.holding;
  if (h.type != HoldingSpec::Type::Infinite && (!(h.ticks > 0.0) || !std::isfinite(h.ticks))) {
    out.push_back(fmt::format("workload.holding: {} holding time must be positive, got {}",
                              to_string(h.type), h.ticks));
  }

  if (scenario.needs_seed() && !scenario.seed) {
    out.push_back("seed: required for stochastic arrivals or exponential holding");
  }
  if (!scenario.needs_seed() && scenario.seed) {
    out.push_back("seed: only allowed for stochastic arrivals or exponential holding");
  }
  return out;
}

void ensure_valid(const Scenario& scenario) {
  if (auto problems = validate_scenario(scenario); !problems.empty()) {
    throw ValidationError(std::move(problems));
  }
}

Scenario parse_scenario(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("scenario document is not valid JSON: {}", e.what()));
  }
  if (!root.is_object()) {
    throw ValidationError("scenario document must be a JSON object");
  }
  detail::JsonReader r;
  constexpr std::string_view where = "scenario";
  r.only_keys(root, where,
              {"schema_version", "label", "capacity", "classes", "workload", "policy",
               "restore_policy", "seed"});
  if (auto v = r.count(root, where, "schema_version"); v && *v != kScenarioSchemaVersion) {
    r.problems.push_back(fmt::format("scenario: unsupported schema_version {}, expected {}", *v,
                                     kScenarioSchemaVersion));
  }

  Scenario s;
  s.label = read_string(r, root, where, "label").value_or("");
  s.capacity = r.number(root, where, "capacity").value_or(0.0);
  if (const auto* list = r.field(root, where, "classes", json::value_t::array)) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      s.classes.push_back(read_class(r, (*list)[i], i));
    }
  }
  if (const auto* w = r.field(root, where, "workload", json::value_t::object)) {
    s.workload = read_workload(r, *w);
  }
  if (auto v = read_string(r, root, where, "policy")) {
    if (auto p = r.guarded(where, [&] { return parse_policy(*v); })) {
      s.policy = *p;
    }
  }
  if (auto v = read_string(r, root, where, "restore_policy")) {
    if (auto p = r.guarded(where, [&] {
          return parse_named(*v,
                             std::array{RestorePolicy::RestoreOnDepart, RestorePolicy::NoRestore},
                             "restore policy");
        })) {
      s.restore_policy = *p;
    }
  }
  if (root.contains("seed")) {
    s.seed = r.count(root, where, "seed");
  }
  if (!r.problems.empty()) {
    throw ValidationError(std::move(r.problems));
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  return parse_scenario(detail::read_file(path));
}

std::optional<Scenario> builtin_scenario(std::string_view name) {
  if (auto doc = embedded::scenario_json(name)) {
    return parse_scenario(*doc);
  }
  return std::nullopt;
}

std::string scenario_to_json(const Scenario& s) {
  json classes = json::array();
  for (const auto& c : s.classes) {
    classes.push_back({{"class_id", c.class_id},
                       {"name", c.name},
                       {"requested_bandwidth", c.requested_bandwidth},
                       {"xi_min", c.xi_min},
                       {"xi_min_new", c.xi_min_new},
                       {"conversational", c.conversational}});
  }
  const auto& w = s.workload;
  json kind_pattern{{"type", to_string(w.kind_pattern.type)}};
  if (w.kind_pattern.type == KindPattern::Type::Ratio) {
    kind_pattern["handoff_fraction"] = w.kind_pattern.handoff_fraction;
  } else if (w.kind_pattern.type == KindPattern::Type::Explicit) {
    json kinds = json::array();
    for (auto k : w.kind_pattern.kinds) {
      kinds.push_back(to_string(k));
    }
    kind_pattern["kinds"] = kinds;
  }
  json holding{{"type", to_string(w.holding.type)}};
  if (w.holding.type == HoldingSpec::Type::Fixed) {
    holding["ticks"] = w.holding.ticks;
  } else if (w.holding.type == HoldingSpec::Type::Exponential) {
    holding["mean"] = w.holding.ticks;
  }
  json workload{{"variant", to_string(w.variant)},
                {"total_requests", w.total_requests},
                {"kind_pattern", kind_pattern},
                {"holding", holding}};
  if (w.variant == WorkloadVariant::PaperSequence) {
    workload["sequence_pattern"] = w.sequence_pattern;
  } else {
    json rates = json::array();
    for (const auto& r : w.rates) {
      rates.push_back({{"class_id", r.class_id}, {"rate", r.rate}});
    }
    workload["rates"] = rates;
    if (w.horizon) {
      workload["horizon"] = *w.horizon;
    }
  }
  json root{{"schema_version", kScenarioSchemaVersion},
            {"label", s.label},
            {"capacity", s.capacity},
            {"classes", classes},
            {"workload", workload},
            {"policy", to_string(s.policy)},
            {"restore_policy", to_string(s.restore_policy)}};
  if (s.seed) {
    root["seed"] = *s.seed;
  }
  return root.dump(2) + "\n";
}

std::string_view to_string(Policy policy) noexcept {
  switch (policy) {
    case Policy::SoftStrict:
      return "SoftStrict";
    case Policy::SoftElastic:
      return "SoftElastic";
    case Policy::Hard:
      return "Hard";
  }
  return "?";
}

std::string_view to_string(WorkloadVariant variant) noexcept {
  return variant == WorkloadVariant::PaperSequence ? "PaperSequence" : "Stochastic";
}

Policy parse_policy(std::string_view text) {
  return parse_named(text, std::array{Policy::SoftStrict, Policy::SoftElastic, Policy::Hard},
                     "policy");
}

CallKind parse_call_kind(std::string_view text) {
  return parse_named(text, std::array{CallKind::New, CallKind::Handoff}, "call kind");
}

}  // namespace softqos
