#pragma once

// Strict field-by-field reading of JSON objects for config files. Unknown
// keys and mistyped values raise ConfigError naming the dotted field path.

#include <set>
#include <string>

#include "json.hpp"
#include "roadrecon/errors.h"

namespace roadrecon::internal {

class JsonFields {
 public:
  JsonFields(const nlohmann::ordered_json& j, std::string where)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void Get(const char* key, T* out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      *out = it->template get<T>();
    } catch (const std::exception&) {
      throw ConfigError(Path(key) + ": wrong type");
    }
  }

  // The raw value of `key`, or null when absent.
  const nlohmann::ordered_json* Find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string Path(const std::string& key) const { return where_ + "." + key; }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const nlohmann::ordered_json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace roadrecon::internal
