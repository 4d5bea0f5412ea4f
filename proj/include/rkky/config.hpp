// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat key = value run configuration (a TOML subset: comments, [section]
// prefixes, numbers, booleans, quoted strings, numeric arrays).
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rkky {

class Config {
 public:
  static Config parse(std::string_view text, std::string_view origin = "<string>");
  static Config load(const std::filesystem::path& path);

  // Applies one "key=value" override.
  void set(std::string_view assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.contains(key); }

  // Typed reads. The forms without a fallback throw a config error naming
  // the key. Reads with a fallback record the value used, so dump() shows
  // the fully resolved configuration.
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback);
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key) const;

  // Either an explicit array `key` or an evenly spaced range given by
  // key_min, key_max, key_points.
  std::vector<double> grid(const std::string& key) const;

  // Sorted "key = value" lines.
  std::vector<std::string> dump() const;

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
};

}  // namespace rkky
