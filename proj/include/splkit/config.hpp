#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace splkit {

// Flat dotted-key configuration: one `key = value` per line, `#` comments.
class Config {
 public:
  static Config fromFile(const std::string& path);
  static Config fromString(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  std::string requiredStr(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  void set(const std::string& key, const std::string& value);

  // Sorted `key=value` lines; the identity that the run hash covers.
  std::string canonical() const;
  std::uint64_t hash() const;  // FNV-1a over canonical()

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

// "a..b" inclusive range or a single "a"; values must be nonnegative integers.
std::vector<std::uint64_t> parseSeedRange(const std::string& text);

std::uint64_t fnv1a(const std::string& text);

}  // namespace splkit
