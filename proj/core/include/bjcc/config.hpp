#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bjcc {

// Flat `key = value` text (a TOML subset): one entry per line, `#` comments,
// quoted strings, bare numbers/booleans and `[a, b, c]` lists. Section
// headers and duplicate keys are rejected.
class KeyValueConfig {
public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  // Raw value text with surrounding quotes removed.
  const std::string& raw(const std::string& key) const;
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;

private:
  std::string origin_;
  std::map<std::string, std::string> entries_;
};

} // namespace bjcc
