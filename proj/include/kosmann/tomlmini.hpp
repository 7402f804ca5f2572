#pragma once

// Parser for the TOML-compatible subset the geometry files use: [section]
// and [section.sub] headers, `key = value` entries with strings, numbers,
// booleans and nested arrays, and # comments.  Arrays may span lines.
// Everything else of TOML (dotted keys, inline tables, dates, multiline
// strings) is out of scope and rejected with a located error.

#include <string>
#include <utility>
#include <vector>

namespace kosmann {

struct TomlValue {
  enum class Kind { String, Number, Bool, Array };
  Kind kind = Kind::Number;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<TomlValue> items;
  int line = 0;
};

struct TomlSection {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, TomlValue>> entries;
  const TomlValue* find(const std::string& key) const;
};

struct TomlDocument {
  std::vector<TomlSection> sections;
  const TomlSection* find(const std::string& name) const;
  std::vector<const TomlSection*> with_prefix(const std::string& prefix) const;
};

TomlDocument parse_toml(const std::string& text);

}  // namespace kosmann
