#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "swflow/config.hpp"
#include "swflow/diagnostics.hpp"

namespace swflow {

/// Process exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfiguration = 2,
  kExitBlowUp = 3,
  kExitFormat = 4,
  kExitDomain = 5,
  kExitPrecondition = 6,
  kExitShape = 7,
  kExitUnsupported = 8,
};

int exit_code_for(const Error& e);

/// Runs `body`, turning library errors into a single line
/// `error[<kind>]: <message>` on `err` and the matching exit code.
int guarded(const std::function<int()>& body, std::ostream& err);

/// Evolves the configured initial data, writing snap_<step>.swfl for every
/// recorded snapshot, energy.csv and summary.txt into `out_dir`. On blow-up
/// the partial history stays on disk, energy.csv covers it, and the
/// BlowUpError is rethrown.
int run_command(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Loads every snap_<step>.swfl of a directory, ordered by step.
FlowHistory load_history(const std::filesystem::path& dir);

struct DiagnoseOptions {
  std::string kind;
  std::filesystem::path history;
  /// Defaults to the history directory.
  std::filesystem::path out;
  std::optional<Point> x0;
  std::optional<double> t0;
  std::vector<double> radii;
  std::optional<double> delta;
  int ratio = 2;
};

/// monotonicity -> monotonicity.csv, detect -> detector.csv,
/// profile -> profile.csv, rescale -> rescaled.swfl. Summary on `log`.
int diagnose_command(const DiagnoseOptions& options, std::ostream& log);

/// clifford | gauge | gradient self-checks on the configured lattice.
/// Returns kExitFailure when a check misses its tolerance.
int check_command(const std::string& kind, const RunConfig& config, std::ostream& log);

}  // namespace swflow
