// Run configuration: a flat list of key = value settings, from a file and/or
// command-line flags, turned into a validated RunConfig.

#ifndef RBFPU_CONFIG_HPP
#define RBFPU_CONFIG_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rbfpu/system.hpp"
#include "rbfpu/trust_region.hpp"

namespace rbfpu {

/// Bad key, malformed value or violated invariant. key() names the setting.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

enum class JacobianMode { ReducedDense, SparseAlternative };

const char* to_string(JacobianMode m) noexcept;

struct ExportSet {
  bool metrics = true;
  bool surface = true;
  bool field = true;
  bool residuals = true;
};

struct RunConfig {
  DiscretizationParams disc;
  std::vector<double> re_schedule{1.0};
  TrustRegionConfig solver;
  JacobianMode jacobian_mode = JacobianMode::ReducedDense;
  std::filesystem::path output_dir = "out";
  ExportSet exports;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

/// Ordered (key, value) pairs; later entries win.
using Settings = std::vector<std::pair<std::string, std::string>>;

/// Every key understood by config_from_settings.
const std::vector<std::string>& config_keys();

/// "circle", "square" or "rounded:<alpha>"; the inverse of ObstacleShape::name().
ObstacleShape parse_shape(const std::string& text);

/// Reads `key = value` lines. '#' starts a comment; blank lines are skipped.
/// Keys may use '-' or '_'.
Settings read_settings_file(const std::filesystem::path& path);

/// Defaults, then `s` in order. "re" is an alias of "re_schedule".
RunConfig config_from_settings(const Settings& s);

/// The effective configuration as key = value pairs, in config_keys() order.
Settings describe(const RunConfig& cfg);

/// describe() on one line: "key=value key=value ...".
std::string describe_line(const RunConfig& cfg);

}  // namespace rbfpu

#endif  // RBFPU_CONFIG_HPP
