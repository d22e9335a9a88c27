#include "grcert/flatconfig.hpp"

#include <fstream>
#include <sstream>

#include "grcert/errors.hpp"

namespace grcert {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

FlatConfig FlatConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path.string());
}

FlatConfig FlatConfig::parse_string(const std::string& text, const std::string& origin) {
  FlatConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = strip_quotes(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (cfg.values_.count(key))
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
    cfg.lines_[key] = line_no;
  }
  return cfg;
}

bool FlatConfig::has(const std::string& key) const { return values_.count(key) > 0; }

void FlatConfig::fail(const std::string& key, const std::string& message) const {
  const auto it = lines_.find(key);
  const std::string loc = it == lines_.end() ? origin_ : origin_ + ":" + std::to_string(it->second);
  throw ConfigError(loc + ": key '" + key + "' " + message);
}

const std::string& FlatConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string FlatConfig::get_string(const std::string& key) const { return raw(key); }

std::string FlatConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double FlatConfig::get_double(const std::string& key) const {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw(key), &pos);
    if (pos != raw(key).size()) fail(key, "has trailing characters");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, "is not a number: '" + raw(key) + "'");
  }
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t FlatConfig::get_int(const std::string& key) const {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(raw(key), &pos);
    if (pos != raw(key).size()) fail(key, "has trailing characters");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, "is not an integer: '" + raw(key) + "'");
  }
}

std::int64_t FlatConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(key, "is not a boolean: '" + v + "'");
}

std::vector<std::string> FlatConfig::get_string_list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) fail(key, "is an empty list");
  return out;
}

std::vector<double> FlatConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : get_string_list(key)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(key, "contains a non-number: '" + item + "'");
    }
  }
  return out;
}

}  // namespace grcert
