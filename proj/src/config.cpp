#include "splkit/config.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

#include "splkit/matrix.hpp"

namespace splkit {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parseNumber(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::runtime_error("config: key '" + key + "' has non-numeric value '" + value + "'");
  }
  return v;
}

}  // namespace

Config Config::fromFile(const std::string& path) {
  return fromString(readTextFile(path), path);
}

Config Config::fromString(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (cfg.values_.count(key)) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                               key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::requiredStr(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw std::runtime_error("config " + origin_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

double Config::num(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parseNumber(key, it->second);
}

int Config::integer(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = parseNumber(key, it->second);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw std::runtime_error("config: key '" + key + "' must be an integer");
  }
  return i;
}

bool Config::flag(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::runtime_error("config: key '" + key + "' must be true or false");
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t Config::hash() const { return fnv1a(canonical()); }

std::vector<std::uint64_t> parseSeedRange(const std::string& text) {
  const auto parseOne = [&](const std::string& part) {
    if (part.empty()) throw std::runtime_error("seeds: empty bound in '" + text + "'");
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw std::runtime_error("seeds: '" + text + "' is not 'a..b' or a single integer");
      }
    }
    return static_cast<std::uint64_t>(std::strtoull(part.c_str(), nullptr, 10));
  };
  const size_t dots = text.find("..");
  std::uint64_t lo, hi;
  if (dots == std::string::npos) {
    lo = hi = parseOne(trim(text));
  } else {
    lo = parseOne(trim(text.substr(0, dots)));
    hi = parseOne(trim(text.substr(dots + 2)));
  }
  if (hi < lo) throw std::runtime_error("seeds: range '" + text + "' is reversed");
  if (hi - lo > 100000) throw std::runtime_error("seeds: range '" + text + "' is too large");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace splkit
