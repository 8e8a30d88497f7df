#include "prt/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prt {

double ConfigValue::as_number() const {
  if (!is_number || nums.empty())
    throw std::runtime_error("config value '" + text + "' is not a number");
  return nums[0];
}

const std::string& ConfigValue::as_text() const { return text; }

const ConfigValue* ConfigBlock::find(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return &v;
  return nullptr;
}

const ConfigBlock* ConfigBlock::block(const std::string& key) const {
  for (const auto& [k, b] : blocks)
    if (k == key) return &b;
  return nullptr;
}

double ConfigBlock::number_or(const std::string& key, double fallback) const {
  const ConfigValue* v = find(key);
  return v ? v->as_number() : fallback;
}

std::string ConfigBlock::text_or(const std::string& key, const std::string& fallback) const {
  const ConfigValue* v = find(key);
  return v ? v->text : fallback;
}

namespace {

struct Lexer {
  const std::string& src;
  const std::string& origin;
  size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else if (c == '\n') {
        ++line;
        ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  std::string word() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size()) {
      char c = src[pos];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' ||
          c == '+' || c == '/')
        ++pos;
      else
        break;
    }
    if (pos == start) fail("expected a name or value");
    return src.substr(start, pos - start);
  }

  std::string quoted() {
    ++pos;  // opening quote
    std::string out;
    while (pos < src.size() && src[pos] != '"') {
      if (src[pos] == '\n') ++line;
      out += src[pos++];
    }
    if (pos >= src.size()) fail("unterminated string");
    ++pos;
    return out;
  }
};

bool parse_number(const std::string& s, double* out) {
  if (s == "inf" || s == "+inf") {
    *out = HUGE_VAL;
    return true;
  }
  if (s == "-inf") {
    *out = -HUGE_VAL;
    return true;
  }
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return false;
  *out = v;
  return true;
}

ConfigValue parse_value(Lexer& lx);

ConfigValue parse_sequence(Lexer& lx, char close) {
  ConfigValue v;
  ++lx.pos;  // opening bracket
  while (lx.peek() != close) {
    if (lx.eof()) lx.fail("unterminated sequence");
    v.items.push_back(parse_value(lx));
  }
  ++lx.pos;  // closing bracket
  for (const ConfigValue& item : v.items) {
    if (item.is_number)
      v.nums.push_back(item.nums[0]);
    else
      for (double d : item.nums) v.nums.push_back(d);
  }
  v.text = "(sequence)";
  return v;
}

ConfigValue parse_value(Lexer& lx) {
  char c = lx.peek();
  if (c == '(') return parse_sequence(lx, ')');
  if (c == '[') return parse_sequence(lx, ']');
  ConfigValue v;
  if (c == '"') {
    v.text = lx.quoted();
    double num;
    if (parse_number(v.text, &num)) {
      v.is_number = true;
      v.nums.push_back(num);
    }
    return v;
  }
  v.text = lx.word();
  if (lx.peek() == '(') {  // call form: keep raw, e.g. random(42)
    ConfigValue args = parse_sequence(lx, ')');
    v.text += '(';
    for (size_t i = 0; i < args.items.size(); ++i) {
      if (i) v.text += ',';
      v.text += args.items[i].text;
    }
    v.text += ')';
    v.nums = args.nums;
    return v;
  }
  double num;
  if (parse_number(v.text, &num)) {
    v.is_number = true;
    v.nums.push_back(num);
  }
  return v;
}

void parse_block(Lexer& lx, ConfigBlock& out, bool top_level) {
  while (!lx.eof()) {
    if (lx.peek() == '}') {
      if (top_level) lx.fail("unexpected '}'");
      ++lx.pos;
      return;
    }
    std::string name = lx.word();
    if (lx.consume('{')) {
      ConfigBlock child;
      parse_block(lx, child, false);
      out.blocks.emplace_back(std::move(name), std::move(child));
    } else if (lx.consume('=')) {
      if (lx.consume('{')) {
        ConfigBlock child;
        parse_block(lx, child, false);
        out.blocks.emplace_back(std::move(name), std::move(child));
      } else {
        out.values.emplace_back(std::move(name), parse_value(lx));
      }
    } else {
      lx.fail("expected '=' or '{' after '" + name + "'");
    }
  }
  if (!top_level) lx.fail("missing '}'");
}

}  // namespace

ConfigBlock parse_config(const std::string& text, const std::string& origin) {
  Lexer lx{text, origin};
  ConfigBlock root;
  parse_block(lx, root, true);
  return root;
}

ConfigBlock load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace prt
