// Flat key=value experiment configuration. Values stay strings until a
// command asks for them; every getter marks its key as consumed so that
// leftover keys can be rejected with the line they came from.
#pragma once

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "starshape/errors.hpp"

namespace starshape {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

class Config {
 public:
  Config() = default;

  // overrides land on line 0 so error messages say "override" not "line 0"
  void set(const std::string& key, const std::string& value, int line = 0) {
    if (key.empty()) throw ConfigError(anchor(line) + "empty key");
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_[key] = entries_.size();
      entries_.push_back({key, value, line, false});
    } else {
      Entry& e = entries_[it->second];
      e.value = value;
      e.line = line;
      e.used = false;
    }
  }

  static Config from_string(const std::string& text,
                            const std::string& origin = "config") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = detail::trim(raw);
      if (s.empty() || s[0] == '#') continue;
      std::size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + " line " + std::to_string(line) +
                          ": expected key=value, got '" + s + "'");
      std::string key = detail::trim(s.substr(0, eq));
      std::string value = detail::trim(s.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + " line " + std::to_string(line) +
                          ": empty key");
      if (cfg.index_.count(key))
        throw ConfigError(origin + " line " + std::to_string(line) +
                          ": duplicate key '" + key + "'");
      cfg.set(key, value, line);
    }
    return cfg;
  }

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream all;
    all << in.rdbuf();
    return from_string(all.str(), path);
  }

  // one key=value per line, insertion order; parsing this text again
  // reproduces the same config
  std::string serialize() const {
    std::string out;
    for (const Entry& e : entries_) out += e.key + "=" + e.value + "\n";
    return out;
  }

  bool has(const std::string& key) const { return index_.count(key) != 0; }

  std::string get_string(const std::string& key) {
    Entry& e = lookup(key);
    return e.value;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
  }

  double get_double(const std::string& key) {
    Entry& e = lookup(key);
    return parse_double(e.value, e);
  }

  double get_double(const std::string& key, double fallback) {
    return has(key) ? get_double(key) : fallback;
  }

  long long get_int(const std::string& key) {
    Entry& e = lookup(key);
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (errno != 0 || end == e.value.c_str() || *end != '\0')
      throw ConfigError(where(e) + "key '" + key + "': not an integer '" +
                        e.value + "'");
    return v;
  }

  long long get_int(const std::string& key, long long fallback) {
    return has(key) ? get_int(key) : fallback;
  }

  std::vector<double> get_list(const std::string& key) {
    Entry& e = lookup(key);
    std::vector<double> out;
    std::string item;
    std::istringstream in(e.value);
    while (std::getline(in, item, ',')) {
      item = detail::trim(item);
      if (item.empty())
        throw ConfigError(where(e) + "key '" + key + "': empty list element");
      out.push_back(parse_double(item, e));
    }
    if (out.empty())
      throw ConfigError(where(e) + "key '" + key + "': empty list");
    return out;
  }

  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) {
    return has(key) ? get_list(key) : fallback;
  }

  // semicolon-separated 2-vectors: "1,1;-1,0;0,-1"
  std::vector<std::vector<double>> get_point_list(const std::string& key) {
    Entry& e = lookup(key);
    std::vector<std::vector<double>> out;
    std::string group;
    std::istringstream in(e.value);
    while (std::getline(in, group, ';')) {
      std::vector<double> pt;
      std::string item;
      std::istringstream gin(group);
      while (std::getline(gin, item, ',')) pt.push_back(parse_double(detail::trim(item), e));
      if (pt.empty())
        throw ConfigError(where(e) + "key '" + key + "': empty point");
      out.push_back(std::move(pt));
    }
    if (out.empty())
      throw ConfigError(where(e) + "key '" + key + "': empty list");
    return out;
  }

  // reject everything no getter touched, anchored to its source line
  void finish() const {
    for (const Entry& e : entries_)
      if (!e.used)
        throw ConfigError(where(e) + "unknown key '" + e.key + "'");
  }

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string key;
    std::string value;
    int line;
    bool used;
  };

  Entry& lookup(const std::string& key) {
    auto it = index_.find(key);
    if (it == index_.end())
      throw ConfigError("missing required key '" + key + "'");
    Entry& e = entries_[it->second];
    e.used = true;
    return e;
  }

  std::string anchor(int line) const {
    if (line <= 0) return "override: ";
    return origin_ + " line " + std::to_string(line) + ": ";
  }

  std::string where(const Entry& e) const { return anchor(e.line); }

  double parse_double(const std::string& text, const Entry& e) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end == text.c_str() || *end != '\0')
      throw ConfigError(where(e) + "key '" + e.key + "': not a number '" +
                        text + "'");
    return v;
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string origin_ = "config";
};

}  // namespace starshape
