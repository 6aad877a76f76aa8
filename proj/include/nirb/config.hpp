#pragma once

#include "nirb/brusselator_study.hpp"
#include "nirb/heat_study.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nirb {

/// Flat key = value settings with dotted section names.
///
///   # comment
///   [heat]              prefix for the keys that follow ("heat.delta")
///   delta = 1e-12
///   heat.final_time = 1  full names work anywhere
///
/// Every key must be one of the known keys (see configs/README.md); unknown
/// keys, malformed lines and bad values raise ConfigError.
class Config {
 public:
  /// All known keys at their defaults.
  Config();

  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::filesystem::path& path);

  /// Merges another file's text on top of this one.
  void merge(const std::string& text, const std::string& origin);
  void set(const std::string& key, const std::string& value);
  /// "key=value", as given to --set.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  /// Sorted "key = value" lines.
  std::string canonical() const;
  /// FNV-1a of canonical(), 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

HeatStudyConfig heat_config_from(const Config& config);
BrusselatorStudyConfig brusselator_config_from(const Config& config);
std::vector<double> coarse_order_sizes(const Config& config);

BrusselatorParameter parse_brusselator_parameter(const std::string& name);
/// "3-2-0.01" -> (a, b, alpha)
BrusselatorParams parse_params_label(const std::string& label);

}  // namespace nirb
