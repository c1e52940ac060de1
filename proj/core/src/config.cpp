#include "bjcc/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bjcc/csv.hpp"
#include "bjcc/errors.hpp"

namespace bjcc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Strips an unquoted trailing `# comment`.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char ch : key)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) return false;
  return true;
}

std::vector<std::string> list_items(const std::string& origin, const std::string& key, const std::string& value) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']')
    throw ConfigError(origin + ": '" + key + "' must be a list like [1, 2, 3]");
  std::vector<std::string> items;
  const std::string body = trim(std::string_view(value).substr(1, value.size() - 2));
  if (body.empty()) return items;
  for (auto& item : csv::split_line(body)) {
    auto t = trim(item);
    if (t.empty()) throw ConfigError(origin + ": empty item in list '" + key + "'");
    items.push_back(std::move(t));
  }
  return items;
}

long long parse_int(const std::string& origin, const std::string& key, const std::string& text) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError(origin + ": '" + key + "' expects an integer, got '" + text + "'");
  return v;
}

double parse_real(const std::string& origin, const std::string& key, const std::string& text) {
  try {
    const double v = csv::parse_double(text);
    if (!std::isfinite(v)) throw ConfigError("non-finite");
    return v;
  } catch (const ConfigError&) {
    throw ConfigError(origin + ": '" + key + "' expects a number, got '" + text + "'");
  }
}

} // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') throw ConfigError(where + ": sections are not supported; use flat keys");
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": missing value for '" + key + "'");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') throw ConfigError(where + ": unterminated string");
      value = value.substr(1, value.size() - 2);
    }
    if (!cfg.entries_.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const { return parse_real(origin_, key, raw(key)); }

long long KeyValueConfig::get_int(const std::string& key) const { return parse_int(origin_, key, raw(key)); }

bool KeyValueConfig::get_bool(const std::string& key) const {
  const auto& v = raw(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(origin_ + ": '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list_items(origin_, key, raw(key))) out.push_back(parse_real(origin_, key, item));
  return out;
}

std::vector<long long> KeyValueConfig::get_int_list(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& item : list_items(origin_, key, raw(key))) out.push_back(parse_int(origin_, key, item));
  return out;
}

} // namespace bjcc
