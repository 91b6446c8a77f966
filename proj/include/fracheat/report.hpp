#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracheat/equivalence.hpp"
#include "fracheat/verify.hpp"

namespace fracheat {

inline constexpr int kReportVersion = 1;

/// One named check: what was evaluated, what came out, what it was held to.
struct CheckRecord {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  nlohmann::ordered_json samples = nlohmann::ordered_json::object();
  nlohmann::ordered_json fitted = nlohmann::ordered_json::object();
  nlohmann::ordered_json targets = nlohmann::ordered_json::object();
  nlohmann::ordered_json tolerances = nlohmann::ordered_json::object();
  bool pass = false;
  std::string diagnostic;  ///< empty unless the check could not be carried out
};

struct VerificationReport {
  std::string suite;
  std::vector<CheckRecord> checks;

  bool pass() const;
  nlohmann::ordered_json to_json() const;
  /// Two-space indented JSON with a trailing newline; no clock or host data.
  void write(std::ostream& os) const;
  void write_file(const std::string& path) const;
};

CheckRecord to_record(const DecayReport& r, int n, double s);
CheckRecord to_record(const CounterexampleReport& r, int n, double s, double slope_tol);
CheckRecord to_record(const ReductionReport& r, double tolerance);

/// Iteration trace: the array of sup-norm differences, one per sweep.
nlohmann::ordered_json trace_json(const PicardState& state);

}  // namespace fracheat
