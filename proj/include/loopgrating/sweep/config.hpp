#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "loopgrating/grating/engine.hpp"

namespace loopgrating::sweep {

struct ScenarioInfo {
  std::string name;
  int figure;
  std::string description;
};

/// The six figure recipes, in a fixed order.
const std::vector<ScenarioInfo>& list_scenarios();

/// Hex SHA-256 of the catalog text as printed by `list`.
std::string catalog_digest();

struct SweepSpec {
  std::string axis = "omega_c";
  std::optional<double> min;
  std::optional<double> max;
  std::optional<int> count;
  std::optional<std::vector<double>> values;

  /// Explicit values if given, else a uniform grid from min/max/count,
  /// else the supplied fallback.
  std::vector<double> resolve(const std::vector<double>& fallback) const;
};

struct SpecialSettings {
  double single_omega_c = 1.056;
  double single_omega_d = 3.0;
  double single_omega_m = 0.7;
  double dammann_omega_c = 1.55;
  double equal_tolerance = 0.05;
};

struct ScenarioConfig {
  std::string scenario = "lopsided";
  atom::AtomFieldParams field;
  atom::MediumParams medium;
  grating::Modulation2D modulation;
  grating::GratingGeometry geometry;
  grating::Geometry2D geometry_2d;
  SweepSpec sweep;
  std::optional<std::vector<double>> phi_list;
  double delta_span = 10.0;
  int delta_count = 401;
  SpecialSettings special;
  std::string output_dir = "out";

  /// Loop phases for the sweep scenarios (default 0, π/2, π, 3π/2).
  std::vector<double> phases() const;
  /// Loop phase for single-case scenarios (first phi_list entry, default π/2).
  double single_phase() const;

  /// Every resolved key with its value, in schema order.
  std::vector<std::pair<std::string, std::string>> resolved() const;

  /// Throws OutOfRange naming the offending key.
  void validate() const;
};

/// Parses a numeric expression: decimal literals, `pi`, unary minus, `*`,
/// `/` and implicit products such as `3pi/2`.
double parse_number(std::string_view text);

/// key = value lines with dotted section prefixes; `#` starts a comment.
/// Throws ParseError (with line number), UnknownKey or OutOfRange.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Documented key list with defaults (used by README and `validate`).
std::vector<std::string> config_keys();

}  // namespace loopgrating::sweep
