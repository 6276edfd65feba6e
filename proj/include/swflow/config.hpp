#pragma once

#include <optional>
#include <string>

#include "swflow/flow.hpp"

namespace swflow {

/// Experiment description read from an INI-style file:
///
///   [lattice]  m, n, length
///   [model]    s_const, fiber_dim = auto | integer
///   [flow]     integrator = euler | rk4, cfl, t_end, snapshot_every, allow_unstable
///   [init]     kind, seed, amplitude, max_mode, center = x1, x2, ..., width = auto | real
///   [output]   dir
///
/// `#` and `;` start comments. m, n and length are required.
struct RunConfig {
  int m = 0;
  int n = 0;
  double length = 0.0;
  double s_const = 0.0;
  /// Empty = auto: clifford::fiber_dimension(m, m even).
  std::optional<int> fiber_dim;
  IntegratorConfig flow;
  InitialDataSpec init;
  std::string output_dir;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError naming the offending key and line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

int resolved_fiber(const RunConfig& config);
LatticePtr config_lattice(const RunConfig& config);
ModelParams config_params(const RunConfig& config);

/// %.17g, so values survive a text round trip.
std::string format_double(double v);

}  // namespace swflow
