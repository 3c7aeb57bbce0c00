#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace optokick::io {

// shortest decimal string that round-trips the double exactly
std::string format_double(double v);

// Minimal INI reader: [section] headers, key = value pairs, '#' and ';'
// comments, surrounding whitespace ignored. Keys are case-sensitive.
class IniFile {
 public:
  static IniFile parse(std::istream& in, const std::string& origin = "<stream>");
  static IniFile parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> find(const std::string& section, const std::string& key) const;

  // typed getters throw std::runtime_error naming origin/section/key
  std::string text(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::uint64_t unsigned_or(const std::string& section, const std::string& key,
                            std::uint64_t fallback) const;
  long integer_or(const std::string& section, const std::string& key, long fallback) const;
  std::string text_or(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  // comma-separated list, items trimmed, empty items dropped
  std::vector<std::string> list_or(const std::string& section, const std::string& key,
                                   const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace optokick::io
