#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skybright/types.hpp"

namespace skybright {

/// Pipeline configuration: `key = value` lines with `#` comments. Every
/// key has a documented default except the input paths; unknown keys are
/// an error so typos cannot silently fall back to defaults.
class PipelineConfig {
public:
  PipelineConfig();

  /// Parse a config file into this object.
  void load(const std::string& path);

  /// Set one key (used for config lines and for CLI overrides, which take
  /// precedence because they are applied after load()).
  void set(const std::string& key, const std::string& value);

  bool is_set(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t get_seed() const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Path value; throws a descriptive error when empty (input paths have
  /// no default).
  std::string require_path(const std::string& key) const;

  /// All keys with resolved values, sorted, one "key = value" per line.
  std::string echo() const;

  /// Reference text: every key, default, and description.
  static std::string reference();

private:
  struct Entry {
    std::string value;
    bool set{false};
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace skybright
