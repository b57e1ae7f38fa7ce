#include "softqos/catalog.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "softqos/embedded_data.hpp"
#include "softqos/error.hpp"
#include "json_reader.hpp"
#include "text_util.hpp"

namespace softqos {

using nlohmann::json;

namespace {

constexpr int kCatalogSchemaVersion = 1;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, std::string_view what) {
  for (Enum v : values) {
    if (detail::iequals(text, to_string(v))) {
      return v;
    }
  }
  throw ValidationError(fmt::format("unknown {} '{}'", what, text));
}

std::optional<QosParameter> read_parameter(detail::JsonReader& r, const json& node, std::size_t index) {
  const std::string where = fmt::format("parameters[{}]", index);
  if (!node.is_object()) {
    r.problems.push_back(fmt::format("{}: expected an object", where));
    return std::nullopt;
  }
  r.only_keys(node, where, {"id", "display_name", "layer", "services", "priority_rank"});
  const auto before = r.problems.size();

  QosParameter p;
  if (const auto* id = r.field(node, where, "id", json::value_t::string)) {
    p.id = id->get<std::string>();
  }
  const std::string named = p.id.empty() ? where : fmt::format("{} ('{}')", where, p.id);
  if (const auto* name = r.field(node, named, "display_name", json::value_t::string)) {
    p.display_name = name->get<std::string>();
  }
  if (const auto* layer = r.field(node, named, "layer", json::value_t::string)) {
    if (auto v = r.guarded(named, [&] { return parse_layer(layer->get<std::string>()); })) {
      p.layer = *v;
    }
  }
  std::set<Service> listed;
  if (const auto* services = r.field(node, named, "services", json::value_t::array)) {
    for (const auto& s : *services) {
      if (!s.is_string()) {
        r.problems.push_back(fmt::format("{}: services entries must be strings", named));
        continue;
      }
      if (auto v = r.guarded(named, [&] { return parse_service(s.get<std::string>()); })) {
        if (!listed.insert(*v).second) {
          r.problems.push_back(
              fmt::format("{}: service '{}' listed twice", named, to_string(*v)));
        }
      }
    }
  }
  if (const auto* ranks = r.field(node, named, "priority_rank", json::value_t::object)) {
    for (const auto& [key, value] : ranks->items()) {
      auto service = r.guarded(named, [&] { return parse_service(key); });
      if (!service) {
        continue;
      }
      if (!value.is_number_integer()) {
        r.problems.push_back(
            fmt::format("{}: priority_rank for {} must be an integer", named, key));
        continue;
      }
      p.priority_rank[*service] = value.get<int>();
    }
    std::set<Service> ranked;
    for (const auto& [s, _] : p.priority_rank) {
      ranked.insert(s);
    }
    if (ranked != listed) {
      r.problems.push_back(fmt::format(
          "{}: services and priority_rank keys must name the same services", named));
    }
  }
  if (r.problems.size() != before) {
    return std::nullopt;
  }
  return p;
}

std::optional<DependencyEdge> read_edge(detail::JsonReader& r, const json& node, std::size_t index) {
  const std::string where = fmt::format("edges[{}]", index);
  if (!node.is_object()) {
    r.problems.push_back(fmt::format("{}: expected an object", where));
    return std::nullopt;
  }
  r.only_keys(node, where, {"influencer", "influenced", "provenance"});
  const auto before = r.problems.size();
  DependencyEdge e;
  if (const auto* v = r.field(node, where, "influencer", json::value_t::string)) {
    e.influencer = v->get<std::string>();
  }
  if (const auto* v = r.field(node, where, "influenced", json::value_t::string)) {
    e.influenced = v->get<std::string>();
  }
  if (const auto* v = r.field(node, where, "provenance", json::value_t::string)) {
    if (auto p = r.guarded(where, [&] { return parse_provenance(v->get<std::string>()); })) {
      e.provenance = *p;
    }
  }
  if (r.problems.size() != before) {
    return std::nullopt;
  }
  return e;
}

}  // namespace

std::vector<Service> QosParameter::services() const {
  std::vector<Service> out;
  for (const auto& [service, _] : priority_rank) {
    out.push_back(service);
  }
  return out;
}

Catalog::Catalog(std::vector<QosParameter> parameters, std::vector<DependencyEdge> edges)
    : parameters_(std::move(parameters)), edges_(std::move(edges)) {
  std::vector<std::string> problems;
  std::map<std::string, std::size_t, std::less<>> by_id;

  for (std::size_t i = 0; i < parameters_.size(); ++i) {
    const auto& p = parameters_[i];
    if (p.id.empty()) {
      problems.push_back(fmt::format("parameters[{}]: id must not be empty", i));
      continue;
    }
    if (p.display_name.empty()) {
      problems.push_back(fmt::format("parameters[{}] ('{}'): display_name must not be empty", i, p.id));
    }
    if (p.priority_rank.empty()) {
      problems.push_back(fmt::format(
          "parameters[{}] ('{}'): must appear in at least one (layer, service) list", i, p.id));
    }
    auto [it, inserted] = by_id.emplace(p.id, i);
    if (!inserted) {
      problems.push_back(fmt::format("parameters[{}]: duplicate id '{}' (first seen at parameters[{}])",
                                     i, p.id, it->second));
    }
  }

  // Ranks within each (layer, service) list must be exactly 1..n.
  std::map<std::pair<Layer, Service>, std::map<int, std::string>> lists;
  for (const auto& p : parameters_) {
    for (const auto& [service, rank] : p.priority_rank) {
      const auto list_name = fmt::format("({}, {})", to_string(p.layer), to_string(service));
      if (rank < 1) {
        problems.push_back(
            fmt::format("parameter '{}': rank {} in list {} must be positive", p.id, rank, list_name));
        continue;
      }
      auto& ranks = lists[{p.layer, service}];
      auto [it, inserted] = ranks.emplace(rank, p.id);
      if (!inserted) {
        problems.push_back(fmt::format("parameter '{}': duplicate rank {} in list {} (also held by '{}')",
                                       p.id, rank, list_name, it->second));
      }
    }
  }
  for (const auto& [key, ranks] : lists) {
    int expected = 1;
    for (const auto& [rank, id] : ranks) {
      if (rank != expected) {
        problems.push_back(fmt::format("list ({}, {}): ranks are not contiguous, rank {} missing before '{}'",
                                       to_string(key.first), to_string(key.second), expected, id));
        break;
      }
      ++expected;
    }
  }

  out_.assign(parameters_.size(), {});
  in_.assign(parameters_.size(), {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    auto from = by_id.find(e.influencer);
    auto to = by_id.find(e.influenced);
    if (from == by_id.end()) {
      problems.push_back(fmt::format("edges[{}] ({} -> {}): dangling influencer '{}'", i,
                                     e.influencer, e.influenced, e.influencer));
    }
    if (to == by_id.end()) {
      problems.push_back(fmt::format("edges[{}] ({} -> {}): dangling influenced '{}'", i,
                                     e.influencer, e.influenced, e.influenced));
    }
    if (e.influencer == e.influenced) {
      problems.push_back(fmt::format("edges[{}]: self-loop on '{}'", i, e.influencer));
      continue;
    }
    if (from != by_id.end() && to != by_id.end()) {
      out_[from->second].push_back(to->second);
      in_[to->second].push_back(from->second);
    }
  }

  if (!problems.empty()) {
    throw ValidationError(std::move(problems));
  }
}

const QosParameter* Catalog::find_id(std::string_view id) const noexcept {
  auto it = std::find_if(parameters_.begin(), parameters_.end(),
                         [id](const QosParameter& p) { return p.id == id; });
  return it == parameters_.end() ? nullptr : &*it;
}

const QosParameter& Catalog::resolve(std::string_view key) const {
  if (const auto* p = find_id(key)) {
    return *p;
  }
  std::vector<const QosParameter*> named;
  for (const auto& p : parameters_) {
    if (detail::iequals(p.display_name, key)) {
      named.push_back(&p);
    }
  }
  if (named.size() == 1) {
    return *named.front();
  }
  if (named.empty()) {
    throw NotFoundError(fmt::format("unknown QoS parameter '{}'", key));
  }
  std::vector<std::string> ids;
  for (const auto* p : named) {
    ids.push_back(p->id);
  }
  throw NotFoundError(fmt::format("'{}' names several parameters; use one of the ids: {}", key,
                                  fmt::join(ids, ", ")));
}

std::vector<std::string> Catalog::suggestions(std::string_view key, std::size_t limit) const {
  std::vector<std::pair<std::size_t, std::string>> scored;
  const auto lowered = detail::to_lower(key);
  for (const auto& p : parameters_) {
    scored.emplace_back(detail::edit_distance(lowered, detail::to_lower(p.id)), p.id);
    scored.emplace_back(detail::edit_distance(lowered, detail::to_lower(p.display_name)),
                        p.display_name);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (const auto& [_, name] : scored) {
    if (out.size() == limit) {
      break;
    }
    if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(name);
    }
  }
  return out;
}

std::size_t Catalog::index_of(const QosParameter& p) const noexcept {
  return static_cast<std::size_t>(&p - parameters_.data());
}

std::vector<const QosParameter*> Catalog::closure(std::size_t start, bool forward) const {
  const auto& adjacency = forward ? out_ : in_;
  std::vector<bool> visited(parameters_.size(), false);
  std::vector<std::size_t> stack{start};
  visited[start] = true;
  std::vector<const QosParameter*> out;
  while (!stack.empty()) {
    const auto node = stack.back();
    stack.pop_back();
    for (auto next : adjacency[node]) {
      if (!visited[next]) {
        visited[next] = true;
        out.push_back(&parameters_[next]);
        stack.push_back(next);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const QosParameter* a, const QosParameter* b) {
    return std::tie(a->display_name, a->id) < std::tie(b->display_name, b->id);
  });
  return out;
}

std::vector<const QosParameter*> parameters_by_priority(const Catalog& catalog, Service service,
                                                        Layer layer) {
  std::vector<const QosParameter*> out;
  for (const auto& p : catalog.parameters()) {
    if (p.layer == layer && p.priority_rank.contains(service)) {
      out.push_back(&p);
    }
  }
  std::sort(out.begin(), out.end(), [service](const QosParameter* a, const QosParameter* b) {
    return a->priority_rank.at(service) < b->priority_rank.at(service);
  });
  return out;
}

std::vector<const QosParameter*> dependents_of(const Catalog& catalog, std::string_view key) {
  return catalog.closure(catalog.index_of(catalog.resolve(key)), true);
}

std::vector<const QosParameter*> influencers_of(const Catalog& catalog, std::string_view key) {
  return catalog.closure(catalog.index_of(catalog.resolve(key)), false);
}

Catalog load_catalog(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("catalog document is not valid JSON: {}", e.what()));
  }
  detail::JsonReader r;
  if (!root.is_object()) {
    throw ValidationError("catalog document must be a JSON object");
  }
  r.only_keys(root, "catalog", {"schema_version", "parameters", "edges"});
  if (const auto* v = r.field(root, "catalog", "schema_version", json::value_t::number_integer)) {
    if (v->get<int>() != kCatalogSchemaVersion) {
      r.problems.push_back(fmt::format("catalog: unsupported schema_version {}, expected {}",
                                       v->get<int>(), kCatalogSchemaVersion));
    }
  }
  std::vector<QosParameter> parameters;
  std::vector<DependencyEdge> edges;
  if (const auto* list = r.field(root, "catalog", "parameters", json::value_t::array)) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (auto p = read_parameter(r, (*list)[i], i)) {
        parameters.push_back(std::move(*p));
      }
    }
  }
  if (const auto* list = r.field(root, "catalog", "edges", json::value_t::array)) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (auto e = read_edge(r, (*list)[i], i)) {
        edges.push_back(std::move(*e));
      }
    }
  }
  if (!r.problems.empty()) {
    throw ValidationError(std::move(r.problems));
  }
  return Catalog(std::move(parameters), std::move(edges));
}

Catalog load_catalog_file(const std::filesystem::path& path) {
  return load_catalog(detail::read_file(path));
}

const Catalog& default_catalog() {
  static const Catalog catalog = load_catalog(embedded::catalog_json());
  return catalog;
}

std::string_view to_string(Layer layer) noexcept {
  switch (layer) {
    case Layer::Application:
      return "Application";
    case Layer::Network:
      return "Network";
    case Layer::Physical:
      return "Physical";
  }
  return "?";
}

std::string_view to_string(Service service) noexcept {
  switch (service) {
    case Service::Voice:
      return "Voice";
    case Service::Video:
      return "Video";
    case Service::Data:
      return "Data";
  }
  return "?";
}

std::string_view to_string(Provenance provenance) noexcept {
  return provenance == Provenance::PaperProse ? "PaperProse" : "UserSupplied";
}

Layer parse_layer(std::string_view text) {
  return parse_enum(text, std::array{Layer::Application, Layer::Network, Layer::Physical}, "layer");
}

Service parse_service(std::string_view text) {
  return parse_enum(text, std::array{Service::Voice, Service::Video, Service::Data}, "service");
}

Provenance parse_provenance(std::string_view text) {
  return parse_enum(text, std::array{Provenance::PaperProse, Provenance::UserSupplied},
                    "provenance");
}

}  // namespace softqos
