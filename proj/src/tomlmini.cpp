#include "kosmann/tomlmini.hpp"

#include <cctype>
#include <cstdlib>

#include "kosmann/error.hpp"

namespace kosmann {

const TomlValue* TomlSection::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

const TomlSection* TomlDocument::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const TomlSection*> TomlDocument::with_prefix(
    const std::string& prefix) const {
  std::vector<const TomlSection*> out;
  for (const auto& s : sections)
    if (s.name.size() > prefix.size() && s.name.compare(0, prefix.size(), prefix) == 0)
      out.push_back(&s);
  return out;
}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at line " + std::to_string(line), pos);
  }

  // whitespace and comments; newlines only when `acrossLines`
  void skip(bool acrossLines) {
    while (!done()) {
      const char c = peek();
      if (c == '#') {
        while (!done() && peek() != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else if (c == '\n' && acrossLines) {
        take();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip(false);
    if (done()) return;
    if (peek() != '\n') fail("unexpected trailing text");
    take();
  }
};

bool bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_bare(Cursor& cur, const char* what) {
  std::string out;
  while (!cur.done() && bare_char(cur.peek())) out.push_back(cur.take());
  if (out.empty()) cur.fail(std::string("expected ") + what);
  return out;
}

TomlValue parse_value(Cursor& cur);

TomlValue parse_string(Cursor& cur) {
  TomlValue v;
  v.kind = TomlValue::Kind::String;
  v.line = cur.line;
  cur.take();  // opening quote
  while (true) {
    if (cur.done() || cur.peek() == '\n') cur.fail("unterminated string");
    char c = cur.take();
    if (c == '"') break;
    if (c == '\\') {
      if (cur.done()) cur.fail("unterminated string");
      const char esc = cur.take();
      if (esc == '"' || esc == '\\') c = esc;
      else cur.fail("unsupported escape in string");
    }
    v.str.push_back(c);
  }
  return v;
}

TomlValue parse_array(Cursor& cur) {
  TomlValue v;
  v.kind = TomlValue::Kind::Array;
  v.line = cur.line;
  cur.take();  // '['
  cur.skip(true);
  if (!cur.done() && cur.peek() == ']') {
    cur.take();
    return v;
  }
  while (true) {
    v.items.push_back(parse_value(cur));
    cur.skip(true);
    if (cur.done()) cur.fail("unterminated array");
    const char c = cur.take();
    if (c == ']') break;
    if (c != ',') cur.fail("expected ',' or ']' in array");
    cur.skip(true);
    if (!cur.done() && cur.peek() == ']') {  // trailing comma
      cur.take();
      break;
    }
  }
  return v;
}

TomlValue parse_value(Cursor& cur) {
  cur.skip(false);
  if (cur.done()) cur.fail("expected a value");
  const char c = cur.peek();
  if (c == '"') return parse_string(cur);
  if (c == '[') return parse_array(cur);
  TomlValue v;
  v.line = cur.line;
  const std::string word = parse_bare(cur, "a value");
  if (word == "true" || word == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.boolean = word == "true";
    return v;
  }
  char* end = nullptr;
  v.kind = TomlValue::Kind::Number;
  v.num = std::strtod(word.c_str(), &end);
  if (end == nullptr || *end != '\0')
    cur.fail("'" + word + "' is not a number, boolean, string or array");
  return v;
}

}  // namespace

TomlDocument parse_toml(const std::string& text) {
  TomlDocument doc;
  Cursor cur{text};
  bool haveSection = false;
  while (true) {
    cur.skip(true);
    if (cur.done()) break;
    if (cur.peek() == '[') {
      cur.take();
      TomlSection sec;
      sec.line = cur.line;
      sec.name = parse_bare(cur, "a section name");
      cur.skip(false);
      if (cur.done() || cur.take() != ']') cur.fail("expected ']' after section name");
      cur.expect_line_end();
      for (const auto& s : doc.sections)
        if (s.name == sec.name)
          cur.fail("duplicate section [" + sec.name + "]");
      doc.sections.push_back(std::move(sec));
      haveSection = true;
      continue;
    }
    const int keyLine = cur.line;
    const std::string key = parse_bare(cur, "a key or section header");
    if (!haveSection)
      throw ParseError("key '" + key + "' outside any section at line " +
                       std::to_string(keyLine), cur.pos);
    cur.skip(false);
    if (cur.done() || cur.take() != '=') cur.fail("expected '=' after key '" + key + "'");
    TomlValue value = parse_value(cur);
    value.line = keyLine;
    cur.expect_line_end();
    TomlSection& current = doc.sections.back();
    if (current.find(key) != nullptr)
      throw ParseError("duplicate key '" + key + "' in section [" + current.name +
                           "] at line " + std::to_string(keyLine),
                       cur.pos);
    current.entries.emplace_back(key, std::move(value));
  }
  return doc;
}

}  // namespace kosmann
