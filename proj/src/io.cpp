#include "optokick/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace optokick::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

IniFile IniFile::parse(std::istream& in, const std::string& origin) {
  IniFile f;
  f.origin_ = origin;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      f.sections_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
    f.sections_[section][key] = value;
  }
  return f;
}

IniFile IniFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse(in, path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  return find(section, key).has_value();
}

std::optional<std::string> IniFile::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string IniFile::text(const std::string& section, const std::string& key) const {
  auto v = find(section, key);
  if (!v)
    throw std::runtime_error(origin_ + ": missing required key [" + section + "] " + key);
  return *v;
}

double IniFile::number(const std::string& section, const std::string& key) const {
  const std::string raw = text(section, key);
  try {
    size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(origin_ + ": [" + section + "] " + key + " is not a number: '" +
                             raw + "'");
  }
}

double IniFile::number_or(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::uint64_t IniFile::unsigned_or(const std::string& section, const std::string& key,
                                   std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = text(section, key);
  std::uint64_t v = 0;
  auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (res.ec != std::errc() || res.ptr != raw.data() + raw.size()) {
    // allow scientific notation for large counts, e.g. 1e6
    const double d = number(section, key);
    if (d < 0 || d != std::floor(d) || d > 1.8e19)
      throw std::runtime_error(origin_ + ": [" + section + "] " + key +
                               " is not an unsigned integer: '" + raw + "'");
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

long IniFile::integer_or(const std::string& section, const std::string& key,
                         long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = text(section, key);
  long v = 0;
  auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (res.ec != std::errc() || res.ptr != raw.data() + raw.size())
    throw std::runtime_error(origin_ + ": [" + section + "] " + key + " is not an integer: '" +
                             raw + "'");
  return v;
}

std::string IniFile::text_or(const std::string& section, const std::string& key,
                             const std::string& fallback) const {
  auto v = find(section, key);
  return v ? *v : fallback;
}

std::vector<std::string> IniFile::list_or(const std::string& section, const std::string& key,
                                          const std::vector<std::string>& fallback) const {
  auto v = find(section, key);
  if (!v) return fallback;
  std::vector<std::string> items;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace optokick::io
