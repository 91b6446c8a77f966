#include "fracheat/report.hpp"

#include <fstream>
#include <ostream>

namespace fracheat {

using ojson = nlohmann::ordered_json;

bool VerificationReport::pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

ojson VerificationReport::to_json() const {
  ojson out;
  out["format"] = "fracheat-verification-report";
  out["version"] = kReportVersion;
  out["suite"] = suite;
  out["pass"] = pass();
  ojson list = ojson::array();
  for (const auto& c : checks) {
    ojson j;
    j["check"] = c.name;
    j["params"] = c.params;
    j["samples"] = c.samples;
    j["fitted"] = c.fitted;
    j["targets"] = c.targets;
    j["tolerances"] = c.tolerances;
    j["pass"] = c.pass;
    if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
    list.push_back(std::move(j));
  }
  out["checks"] = std::move(list);
  return out;
}

void VerificationReport::write(std::ostream& os) const { os << to_json().dump(2) << '\n'; }

void VerificationReport::write_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot open report file " + path);
  write(os);
  if (!os) throw InvalidArgument("failed writing report file " + path);
}

namespace {

ojson point_json(const SpaceTimePoint& p, int n) {
  ojson x = ojson::array();
  for (int d = 0; d < n; ++d) x.push_back(p.x[d]);
  return ojson{{"x", x}, {"t", p.t}};
}

}  // namespace

CheckRecord to_record(const DecayReport& r, int n, double s) {
  CheckRecord c;
  c.name = std::string("decay/") + to_string(r.ray.family);
  c.params = {{"n", n}, {"s", s}, {"family", to_string(r.ray.family)},
              {"anchor", point_json({r.ray.anchor, r.ray.anchor_t}, n)}};
  c.samples = {{"magnitudes", r.ray.magnitudes}, {"values", r.values}, {"weighted", r.weighted}};
  c.fitted["exponent"] = r.fitted_exponent;
  // Along |x|^2 = |t| the same samples seen as a function of |x|.
  if (r.ray.family == RayFamily::parabola) c.fitted["exponent_in_abs_x"] = 2.0 * r.fitted_exponent;
  if (r.lower_bound_ratio_min) c.fitted["lower_bound_ratio_min"] = *r.lower_bound_ratio_min;
  if (r.trend_slope) c.fitted["trend_slope"] = *r.trend_slope;
  c.fitted["upper_bound_ok"] = r.upper_bound_ok;
  c.fitted["degenerate"] = r.degenerate;
  c.targets["exponent"] = -r.target_exponent;
  if (r.ray.family == RayFamily::parabola) c.targets["exponent_in_abs_x"] = -2.0 * r.target_exponent;
  c.tolerances["exponent"] = r.tolerance;
  c.pass = r.pass;
  return c;
}

CheckRecord to_record(const CounterexampleReport& r, int n, double s, double slope_tol) {
  CheckRecord c;
  c.name = "counterexample";
  c.params = {{"n", n}, {"s", s}, {"times", r.control_times}};
  c.samples = {{"magnitudes", r.parabola.ray.magnitudes},
               {"values", r.parabola.values},
               {"weighted", r.parabola.weighted},
               {"control_weighted", r.control_weighted}};
  c.fitted = {{"lower_bound_floor", r.parabola.lower_bound_ratio_min.value_or(0.0)},
              {"trend_slope", r.parabola.trend_slope.value_or(0.0)},
              {"exponent", r.parabola.fitted_exponent},
              {"control_decays", r.control_decays},
              {"method_gap", r.method_gap}};
  c.targets = {{"lower_bound_floor", "positive"}, {"trend_slope", 0.0},
               {"exponent", -r.parabola.target_exponent}};
  c.tolerances = {{"trend_slope", slope_tol}};
  c.pass = r.pass;
  return c;
}

CheckRecord to_record(const ReductionReport& r, double tolerance) {
  CheckRecord c;
  c.name = std::string("reduction/") + to_string(r.kind);
  c.params = {{"orders", r.orders}};
  c.samples = {{"operator_values", r.operator_values},
               {"reference_values", r.reference_values},
               {"errors", r.errors}};
  c.fitted = {{"max_relative_error", r.max_relative_error}, {"monotone", r.monotone}};
  c.targets = {{"max_relative_error", 0.0}};
  c.tolerances = {{"max_relative_error", tolerance}};
  c.pass = r.max_relative_error < tolerance && r.monotone;
  return c;
}

ojson trace_json(const PicardState& state) { return ojson(state.diff_norms); }

}  // namespace fracheat
