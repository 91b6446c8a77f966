#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracheat::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kConfigError = 2,
  kNotConverged = 3,
  kNotContracting = 4,
};

/// Defaults shared by every command and suite.
///
///   key            value   meaning
///   s              0.5     fractional order
///   n              1       space dimension
///   delta          1e-4    near-field cut in sigma
///   sigma_max      1e8     cap on the automatically chosen far cut
///   n_time_nodes   12      Legendre nodes per sigma panel
///   n_space_nodes  24      spatial nodes per axis
///   panel_ratio    2       geometric grading of sigma panels
///   tol            1e-6    Picard stopping tolerance
struct Defaults {
  static constexpr double s = 0.5;
  static constexpr int n = 1;
  static constexpr double delta = 1e-4;
  static constexpr double sigma_max = 1e8;
  static constexpr int n_time_nodes = 12;
  static constexpr int n_space_nodes = 24;
  static constexpr double panel_ratio = 2.0;
  static constexpr double tol = 1e-6;
};

/// Environment variable read for the worker count; `--threads` overrides it.
inline constexpr const char* kThreadsEnv = "FRACHEAT_THREADS";

/// Runs `fracheat <args...>` (args exclude the program name). Normal output
/// goes to `out`; diagnostics go to `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracheat::cli
