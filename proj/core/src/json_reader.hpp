#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "softqos/error.hpp"

namespace softqos::detail {

// Collects schema problems instead of stopping at the first one.
class JsonReader {
 public:
  std::vector<std::string> problems;

  const nlohmann::json* field(const nlohmann::json& obj, std::string_view where, const char* key,
                    nlohmann::json::value_t type) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      problems.push_back(fmt::format("{}: missing field '{}'", where, key));
      return nullptr;
    }
    const bool ok = it->type() == type ||
                    (type == nlohmann::json::value_t::number_integer && it->is_number_unsigned());
    if (!ok) {
      problems.push_back(fmt::format("{}: field '{}' has type {}, expected {}", where, key,
                                     it->type_name(), nlohmann::json(type).type_name()));
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const nlohmann::json& obj, std::string_view where,
                               const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      problems.push_back(fmt::format("{}: missing field '{}'", where, key));
      return std::nullopt;
    }
    if (!it->is_number()) {
      problems.push_back(
          fmt::format("{}: field '{}' must be a number, got {}", where, key, it->type_name()));
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<std::uint64_t> count(const nlohmann::json& obj, std::string_view where,
                                     const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      problems.push_back(fmt::format("{}: missing field '{}'", where, key));
      return std::nullopt;
    }
    if (!it->is_number_unsigned()) {
      problems.push_back(
          fmt::format("{}: field '{}' must be a non-negative integer", where, key));
      return std::nullopt;
    }
    return it->get<std::uint64_t>();
  }

  void only_keys(const nlohmann::json& obj, std::string_view where,
                 std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        problems.push_back(fmt::format("{}: unknown field '{}'", where, key));
      }
    }
  }

  template <typename F>
  auto guarded(std::string_view where, F&& f) -> std::optional<decltype(f())> {
    try {
      return f();
    } catch (const ValidationError& e) {
      problems.push_back(fmt::format("{}: {}", where, e.what()));
      return std::nullopt;
    }
  }
};

}  // namespace softqos::detail
