#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace softqos {

enum class Layer { Application, Network, Physical };
enum class Service { Voice, Video, Data };
enum class Provenance { PaperProse, UserSupplied };

/// A named QoS metric. A parameter lives on one protocol layer but may be
/// ranked in several service lists; `priority_rank` holds one rank per
/// service it belongs to (1 = most important).
struct QosParameter {
  std::string id;
  std::string display_name;
  Layer layer = Layer::Application;
  std::map<Service, int> priority_rank;

  std::vector<Service> services() const;
};

/// `influencer` affects the performance of `influenced`.
struct DependencyEdge {
  std::string influencer;
  std::string influenced;
  Provenance provenance = Provenance::PaperProse;
};

/// Validated, immutable parameter graph.
class Catalog {
 public:
  Catalog() = default;

  /// Checks referential integrity, id uniqueness and rank contiguity;
  /// throws ValidationError listing every violation.
  Catalog(std::vector<QosParameter> parameters, std::vector<DependencyEdge> edges);

  const std::vector<QosParameter>& parameters() const noexcept { return parameters_; }
  const std::vector<DependencyEdge>& edges() const noexcept { return edges_; }

  /// Resolves an id, or failing that a display name (case-insensitive).
  /// Throws NotFoundError when nothing matches or a name is ambiguous.
  const QosParameter& resolve(std::string_view key) const;
  const QosParameter* find_id(std::string_view id) const noexcept;

  /// Closest ids and display names to `key`, best first.
  std::vector<std::string> suggestions(std::string_view key, std::size_t limit = 3) const;

 private:
  friend std::vector<const QosParameter*> dependents_of(const Catalog&, std::string_view);
  friend std::vector<const QosParameter*> influencers_of(const Catalog&, std::string_view);

  std::vector<const QosParameter*> closure(std::size_t start, bool forward) const;
  std::size_t index_of(const QosParameter& p) const noexcept;

  std::vector<QosParameter> parameters_;
  std::vector<DependencyEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// Parses a catalog document (JSON, schema_version 1).
Catalog load_catalog(std::string_view document);
Catalog load_catalog_file(const std::filesystem::path& path);

/// The catalog shipped with the library.
const Catalog& default_catalog();

/// Parameters tagged with (layer, service), ascending by rank.
std::vector<const QosParameter*> parameters_by_priority(const Catalog& catalog, Service service,
                                                        Layer layer);

/// Everything reachable from `key` along influence edges, excluding the
/// start, sorted by display name then id.
std::vector<const QosParameter*> dependents_of(const Catalog& catalog, std::string_view key);

/// Everything that reaches `key` along influence edges, excluding the start.
std::vector<const QosParameter*> influencers_of(const Catalog& catalog, std::string_view key);

std::string_view to_string(Layer layer) noexcept;
std::string_view to_string(Service service) noexcept;
std::string_view to_string(Provenance provenance) noexcept;

/// Case-insensitive parse; throws ValidationError on unknown names.
Layer parse_layer(std::string_view text);
Service parse_service(std::string_view text);
Provenance parse_provenance(std::string_view text);

}  // namespace softqos
