#pragma once

#include <optional>
#include <string_view>
#include <vector>

// Data files shipped under core/data, compiled into the library.
namespace softqos::embedded {

std::string_view catalog_json();

/// Returns the shipped scenario document named `name` (without extension).
std::optional<std::string_view> scenario_json(std::string_view name);

std::vector<std::string_view> scenario_names();

}  // namespace softqos::embedded
