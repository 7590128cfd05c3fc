#include "core/config_file.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace relsim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

FlatConfig FlatConfig::parse(const std::string& text) {
  FlatConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    require(eq != std::string::npos, Errc::parse,
            "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    require(!key.empty(), Errc::parse,
            "config line " + std::to_string(lineno) + ": empty key");
    cfg.entries.emplace_back(std::move(key), std::move(value));
  }
  return cfg;
}

FlatConfig FlatConfig::read_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool FlatConfig::has(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return true;
  return false;
}

std::optional<std::string> FlatConfig::get(const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& [k, v] : entries)
    if (k == key) out = v;
  return out;
}

std::vector<std::string> FlatConfig::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries)
    if (k == key) out.push_back(v);
  return out;
}

std::string FlatConfig::get_string(const std::string& key,
                                   const std::string& dflt) const {
  auto v = get(key);
  return v ? *v : dflt;
}

double FlatConfig::get_double(const std::string& key, double dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  try {
    size_t pos = 0;
    double out = std::stod(*v, &pos);
    require(pos == v->size(), Errc::parse, "");
    return out;
  } catch (...) {
    raise(Errc::parse, "config key " + key + ": not a number: " + *v);
  }
}

long long FlatConfig::get_int(const std::string& key, long long dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  try {
    size_t pos = 0;
    long long out = std::stoll(*v, &pos);
    require(pos == v->size(), Errc::parse, "");
    return out;
  } catch (...) {
    raise(Errc::parse, "config key " + key + ": not an integer: " + *v);
  }
}

bool FlatConfig::get_bool(const std::string& key, bool dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  raise(Errc::parse, "config key " + key + ": not a boolean: " + *v);
}

std::string FlatConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string config_hash(const FlatConfig& cfg) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : cfg.canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace relsim
