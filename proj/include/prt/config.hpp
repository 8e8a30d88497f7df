#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prt {

// Parser for the block-structured text format used by scenario and sweep
// files:
//
//   # comment
//   key = value
//   section {
//     key = (1, 2, 3)
//     nested { ... }
//   }
//
// Values are numbers, bare words, quoted strings, call-like words such as
// random(42), or (possibly nested) tuples/lists.

struct ConfigValue {
  std::string text;           // raw text (word, string, or call)
  std::vector<double> nums;   // numeric payload: scalar, tuple, or flat list
  std::vector<ConfigValue> items;  // tuple/list elements (for nested tuples)
  bool is_number = false;

  double as_number() const;            // throws if not numeric
  const std::string& as_text() const;  // raw text
};

struct ConfigBlock {
  std::vector<std::pair<std::string, ConfigValue>> values;
  std::vector<std::pair<std::string, ConfigBlock>> blocks;

  const ConfigValue* find(const std::string& key) const;
  const ConfigBlock* block(const std::string& key) const;

  double number_or(const std::string& key, double fallback) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  bool has(const std::string& key) const { return find(key) != nullptr; }
};

ConfigBlock parse_config(const std::string& text, const std::string& origin = "<config>");
ConfigBlock load_config_file(const std::string& path);

}  // namespace prt
