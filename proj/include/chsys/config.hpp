#pragma once

// Run configuration: a YAML document with nested sections mirroring the
// library's parameter structs. Unknown keys are errors.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chsys/dynamics.hpp"
#include "chsys/integrator.hpp"

namespace chsys {

struct GridConfig {
  std::size_t n_points = 1024;
  double L = 20.0;
  bool operator==(const GridConfig&) const = default;
};

struct InitConfig {
  InitSpec m0;
  InitSpec n0;
  bool operator==(const InitConfig&) const = default;
};

struct CharacteristicsConfig {
  std::size_t n_seeds = 64;
  std::vector<double> extra_seeds;
  bool operator==(const CharacteristicsConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "run";
  std::size_t snapshot_every = 0;  // in samples; 0 disables snapshots
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  SystemKind system = SystemKind::SystemA;
  GridConfig grid;
  IntegratorConfig integrator;
  InitConfig init;
  CharacteristicsConfig characteristics;
  OutputConfig outputs;
  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::optional<int> line = {}, std::optional<int> column = {});
  std::optional<int> line() const { return line_; }
  std::optional<int> column() const { return column_; }

 private:
  std::optional<int> line_, column_;
};

/// Parses and validates. Line and column in errors are 1-based.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Emits every field, defaults included; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);
/// Checks every invariant that can be checked without running: grid, integrator,
/// profiles on the grid, seeds inside the box.
void validate(const RunConfig& cfg);

/// Applies "a.b.c=value" assignments to the YAML form of `cfg` and reparses.
/// Sequence elements are addressed by index ("init.m0.0.amplitude=2").
RunConfig apply_overrides(const RunConfig& cfg, const std::vector<std::string>& assignments);

/// Shortest decimal string that reads back to the same double.
std::string format_real(double x);

}  // namespace chsys
