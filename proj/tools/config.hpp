// Copyright 2026 The bidlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Strict JSON config access: every key read is recorded, and finish()
// rejects whatever was left over.

#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace bidlab::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& msg)
      : std::runtime_error("config key '" + key + "': " + msg), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class ConfigNode {
 public:
  ConfigNode(const nlohmann::json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_->contains(key); }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) {
      seen_.insert(key);
      return fallback;
    }
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    seen_.insert(key);
    const std::string full = qualify(key);
    if (!has(key)) throw ConfigError(full, "missing required key");
    try {
      const auto& v = (*j_)[key];
      if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
        if (!v.is_number_unsigned()) throw ConfigError(full, "expected a nonnegative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(full, "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(full, "expected a string");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(full, "expected true or false");
      }
      return v.template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(full, e.what());
    }
  }

  ConfigNode child(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError(qualify(key), "missing required section");
    return ConfigNode((*j_)[key], qualify(key));
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError(qualify(key), "missing required key");
    return (*j_)[key];
  }

  std::string qualify(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  /// Throws on the first key that was never read.
  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(qualify(it.key()), "unknown key");
    }
  }

 private:
  const nlohmann::json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace bidlab::cli
