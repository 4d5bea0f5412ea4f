// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "rkky/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rkky/errors.hpp"

namespace rkky {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  return true;
}

double to_double(std::string_view text, const std::string& key) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw Error(ErrorCode::config_error,
                "key '" + key + "': expected a number, got '" + std::string(text) + "'");
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, std::string_view origin) {
  Config cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    ++line_no;
    const std::string_view line = trim(strip_comment(text.substr(pos, end - pos)));
    pos = end + 1;
    if (line.empty()) continue;
    const auto where = std::string(origin) + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']' || !valid_key(trim(line.substr(1, line.size() - 2))))
        throw Error(ErrorCode::config_error, where + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2))) + ".";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::config_error, where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw Error(ErrorCode::config_error, where + ": bad key");
    if (value.empty()) throw Error(ErrorCode::config_error, where + ": empty value");
    cfg.set(section + std::string(key), std::string(value));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void Config::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorCode::config_error, "override must be key=value: " + std::string(assignment));
  const auto key = trim(assignment.substr(0, eq));
  if (!valid_key(key)) throw Error(ErrorCode::config_error, "bad override key");
  set(std::string(key), std::string(trim(assignment.substr(eq + 1))));
}

void Config::set(const std::string& key, const std::string& value) {
  std::string v = value;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  values_[key] = v;
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::config_error, "missing required key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const { return to_double(raw(key), key); }

double Config::number(const std::string& key, double fallback) {
  if (!has(key)) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, fallback);  // shortest round trip
    values_[key] = std::string(buf, res.ptr);
    return fallback;
  }
  return number(key);
}

int Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw Error(ErrorCode::config_error, "key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

int Config::integer(const std::string& key, int fallback) {
  if (!has(key)) values_[key] = std::to_string(fallback);
  return integer(key);
}

bool Config::flag(const std::string& key, bool fallback) {
  if (!has(key)) values_[key] = fallback ? "true" : "false";
  const auto& v = raw(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw Error(ErrorCode::config_error, "key '" + key + "': expected true or false");
}

std::string Config::text(const std::string& key, const std::string& fallback) {
  if (!has(key)) values_[key] = fallback;
  return raw(key);
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::string_view v = trim(raw(key));
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw Error(ErrorCode::config_error, "key '" + key + "': expected an array [a, b, ...]");
  v = trim(v.substr(1, v.size() - 2));
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(to_double(v.substr(0, comma), key));
    if (comma == std::string_view::npos) break;
    v = trim(v.substr(comma + 1));
  }
  return out;
}

std::vector<double> Config::grid(const std::string& key) const {
  std::vector<double> out;
  if (has(key)) {
    out = numbers(key);
  } else {
    const double lo = number(key + "_min");
    const double hi = number(key + "_max");
    const int n = integer(key + "_points");
    if (n < 1) throw Error(ErrorCode::config_error, "key '" + key + "_points' must be >= 1");
    if (n == 1 && lo != hi)
      throw Error(ErrorCode::config_error, "key '" + key + "_points' is 1 but the range is open");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  if (out.empty()) throw Error(ErrorCode::config_error, "key '" + key + "' gives an empty grid");
  return out;
}

std::vector<std::string> Config::dump() const {
  std::vector<std::string> lines;
  for (const auto& [k, v] : values_) lines.push_back(k + " = " + v);
  return lines;
}

}  // namespace rkky
