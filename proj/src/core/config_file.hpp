#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relsim {

// Flat `key = value` configuration text: one pair per line, '#' comments,
// repeated keys preserved in order.
struct FlatConfig {
  std::vector<std::pair<std::string, std::string>> entries;

  static FlatConfig parse(const std::string& text);
  static FlatConfig read_file(const std::string& path);

  bool has(const std::string& key) const;
  // Last assignment wins for scalar lookups.
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;

  // Normalized single-spaced rendering, used for provenance hashing.
  std::string canonical() const;
};

// FNV-1a over the canonical rendering; stable across whitespace and
// comment-only edits.
std::string config_hash(const FlatConfig& cfg);

}  // namespace relsim
