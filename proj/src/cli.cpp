#include "fracheat/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracheat/core.hpp"
#include "fracheat/equivalence.hpp"
#include "fracheat/greens.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/report.hpp"
#include "fracheat/special.hpp"
#include "fracheat/spectral.hpp"
#include "fracheat/verify.hpp"

namespace fracheat::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

class ConfigError : public Error {
 public:
  using Error::Error;
};

const std::vector<std::string> kCommonKeys = {"s",           "n",           "delta",
                                              "sigma_max",   "n_time_nodes", "n_space_nodes",
                                              "panel_ratio"};

// Typed read access to a JSON object whose key set has been checked.
class Config {
 public:
  Config(json doc, const std::string& where, const std::vector<std::string>& keys,
         bool with_common = true)
      : doc_(std::move(doc)), where_(where) {
    if (doc_.is_null()) doc_ = json::object();
    if (!doc_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    if (with_common) allowed.insert(kCommonKeys.begin(), kCommonKeys.end());
    for (const auto& item : doc_.items())
      if (!allowed.count(item.key()))
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

  bool has(const std::string& key) const { return doc_.contains(key); }
  const json& raw(const std::string& key) const { return doc_.at(key); }

  double number(const std::string& key, double def) const {
    if (!has(key)) return def;
    const json& v = doc_.at(key);
    if (!v.is_number()) throw ConfigError(where_ + ": '" + key + "' must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int def) const {
    if (!has(key)) return def;
    const json& v = doc_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where_ + ": '" + key + "' must be an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& def) const {
    if (!has(key)) return def;
    const json& v = doc_.at(key);
    if (!v.is_string()) throw ConfigError(where_ + ": '" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) const {
    if (!has(key)) return def;
    return number_list(doc_.at(key), where_ + ": '" + key + "'");
  }

  static std::vector<double> number_list(const json& v, const std::string& what) {
    if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(what + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  json doc_;
  std::string where_;
};

OperatorParams params_from(const Config& c) {
  OperatorParams p;
  p.s = FracOrder(c.number("s", Defaults::s));
  p.n = checked_dimension(c.integer("n", Defaults::n));
  p.delta = c.number("delta", Defaults::delta);
  p.sigma_max = c.number("sigma_max", Defaults::sigma_max);
  p.n_time_nodes = c.integer("n_time_nodes", Defaults::n_time_nodes);
  p.n_space_nodes = c.integer("n_space_nodes", Defaults::n_space_nodes);
  p.panel_ratio = c.number("panel_ratio", Defaults::panel_ratio);
  p.validate();
  return p;
}

ojson params_json(const OperatorParams& p) {
  return {{"s", p.s.value()},       {"n", p.n},
          {"delta", p.delta},       {"sigma_max", p.sigma_max},
          {"n_time_nodes", p.n_time_nodes}, {"n_space_nodes", p.n_space_nodes},
          {"panel_ratio", p.panel_ratio}};
}

// Points as [[x1..xn, t], ...].
std::vector<SpaceTimePoint> points_from(const Config& c, const std::string& key, int n,
                                        const std::vector<std::vector<double>>& def) {
  std::vector<std::vector<double>> rows = def;
  if (c.has(key)) {
    const json& v = c.raw(key);
    if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of [x..., t] rows");
    rows.clear();
    for (const auto& r : v) rows.push_back(Config::number_list(r, "'" + key + "' row"));
  }
  std::vector<SpaceTimePoint> out;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n + 1)
      throw ConfigError("'" + key + "' rows need " + std::to_string(n + 1) + " numbers");
    SpaceTimePoint p{{0.0, 0.0, 0.0}, r.back()};
    for (int d = 0; d < n; ++d) p.x[d] = r[d];
    out.push_back(p);
  }
  return out;
}

ojson points_json(const std::vector<SpaceTimePoint>& pts, int n) {
  ojson out = ojson::array();
  for (const auto& p : pts) {
    ojson row = ojson::array();
    for (int d = 0; d < n; ++d) row.push_back(p.x[d]);
    row.push_back(p.t);
    out.push_back(std::move(row));
  }
  return out;
}

// JSON has no infinities; non-finite values are spelled out.
ojson number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// ---------------------------------------------------------------------------
// Suites

VerificationReport suite_decay(const Config& c) {
  const OperatorParams p = params_from(c);
  const std::string spec = c.string("field", "schwartz_product(a=1,b=1)");
  const AnalyticField phi = parse_field(spec);
  const double tol = c.number("tolerance", 0.15);

  std::vector<RaySpec> rays;
  if (c.has("rays")) {
    const json& list = c.raw("rays");
    if (!list.is_array()) throw ConfigError("'rays' must be an array");
    for (const auto& item : list) {
      const Config r(item, "ray", {"family", "first", "ratio", "count", "anchor", "anchor_t"}, false);
      const std::string fam = r.string("family", "time_axis_negative");
      RayFamily family;
      if (fam == "space_axis") family = RayFamily::space_axis;
      else if (fam == "time_axis_negative") family = RayFamily::time_axis_negative;
      else if (fam == "time_axis_positive") family = RayFamily::time_axis_positive;
      else if (fam == "parabola") family = RayFamily::parabola;
      else throw ConfigError("unknown ray family '" + fam + "'");
      RaySpec ray = RaySpec::geometric(family, r.number("first", 10.0), r.number("ratio", 10.0),
                                       r.integer("count", 4));
      const auto anchor = r.numbers("anchor", {});
      if (anchor.size() > 3) throw ConfigError("ray anchor has more than 3 components");
      for (std::size_t d = 0; d < anchor.size(); ++d) ray.anchor[d] = anchor[d];
      ray.anchor_t = r.number("anchor_t", 0.0);
      rays.push_back(ray);
    }
  } else {
    rays = {RaySpec::geometric(RayFamily::time_axis_negative, 10.0, 10.0, 4),
            RaySpec::geometric(RayFamily::parabola, 10.0, 10.0, 4)};
  }

  VerificationReport rep;
  rep.suite = "decay";
  for (const auto& ray : rays) {
    ray.validate();
    try {
      auto rec = to_record(decay_estimate_check(phi, p, {ray}, tol).front(), p.n, p.s);
      rec.params["field"] = phi.to_string();
      rep.checks.push_back(std::move(rec));
    } catch (const InsufficientDynamicRange& e) {
      CheckRecord rec;
      rec.name = std::string("decay/") + to_string(ray.family);
      rec.params = {{"n", p.n}, {"s", p.s.value()}, {"family", to_string(ray.family)},
                    {"field", phi.to_string()}};
      rec.samples = {{"magnitudes", ray.magnitudes}};
      rec.tolerances = {{"exponent", tol}};
      rec.diagnostic = e.what();
      rep.checks.push_back(std::move(rec));
    }
  }
  return rep;
}

VerificationReport suite_counterexample(const Config& c) {
  const OperatorParams p = params_from(c);
  const AnalyticField bump = parse_field(c.string("bump", "bump(r1=1,r2=2,t1=1,t2=4)"));
  if (bump.kind() != FieldKind::bump) throw ConfigError("'bump' must be a bump field");
  const auto times = c.numbers("times", {-1e2, -1e3, -1e4});
  const double slope_tol = c.number("slope_tolerance", 0.05);

  std::vector<std::pair<int, double>> cases{{p.n, p.s.value()}};
  if (c.has("cases")) {
    cases.clear();
    const json& list = c.raw("cases");
    if (!list.is_array()) throw ConfigError("'cases' must be an array of [n, s] pairs");
    for (const auto& item : list) {
      const auto v = Config::number_list(item, "'cases' entry");
      if (v.size() != 2 || v[0] != std::floor(v[0]))
        throw ConfigError("'cases' entries must be [n, s] with integer n");
      cases.emplace_back(static_cast<int>(v[0]), v[1]);
    }
  }

  VerificationReport rep;
  rep.suite = "counterexample";
  for (const auto& [n, s] : cases) {
    const auto r = counterexample_sharpness(checked_dimension(n), FracOrder(s), bump, times, slope_tol);
    auto rec = to_record(r, n, s, slope_tol);
    rec.params["bump"] = bump.to_string();
    rep.checks.push_back(std::move(rec));
  }
  return rep;
}

VerificationReport suite_reduction(const Config& c) {
  const OperatorParams p = params_from(c);
  const auto pts = points_from(c, "points", p.n, {{0.0, 0.0}, {0.4, 0.7}, {-1.1, 0.3}});
  const auto limit_pts = points_from(c, "limit_points", p.n, {{0.0, 0.0}});
  const double tol = c.number("tolerance", 1e-3);
  const double limit_tol = c.number("limit_tolerance", 5e-2);
  const AnalyticField space = parse_field(c.string("space_field", "coswave(xi=1,phase=0.3)"));
  const AnalyticField time = parse_field(c.string("time_field", "coswave(rho=1,phase=0.3)"));
  const AnalyticField limit = parse_field(c.string("limit_field", "gaussian(a=1)"));

  VerificationReport rep;
  rep.suite = "reduction";
  auto add = [&](ReductionKind kind, const AnalyticField& f, const std::vector<SpaceTimePoint>& at,
                 double t) {
    auto rec = to_record(reduction_check(kind, f, p, at), t);
    rec.params["field"] = f.to_string();
    rec.params["points"] = points_json(at, p.n);
    rep.checks.push_back(std::move(rec));
  };
  add(ReductionKind::space_to_fraclap, space, pts, tol);
  add(ReductionKind::time_to_marchaud, time, pts, tol);
  add(ReductionKind::s_to_one, limit, limit_pts, limit_tol);
  return rep;
}

VerificationReport suite_symbol(const Config& c) {
  OperatorParams p = params_from(c);
  const auto orders = c.numbers("orders", {0.25, 0.5, 0.75});
  const auto pts = points_from(c, "points", p.n, {{0.0, 0.0}, {0.3, -0.2}});
  const double tol = c.number("tolerance", 1e-3);
  const auto lambdas = c.numbers("lambdas", {0.5, 1.0, 2.0, 4.0, 8.0});
  const double gamma_tol = c.number("gamma_tolerance", 1e-6);
  const auto radii = c.numbers("radii", {0.5, 1.0, 2.0, 4.0});
  const double kernel_tol = c.number("kernel_tolerance", 1e-8);

  struct Wave {
    Point xi{0.0, 0.0, 0.0};
    double rho = 0.0, phase = 0.0;
  };
  std::vector<Wave> waves = {{{1.0, 0.0, 0.0}, 0.0, 0.0},
                             {{0.0, 0.0, 0.0}, 1.0, 0.0},
                             {{1.0, 0.0, 0.0}, 1.0, 0.0}};
  if (c.has("waves")) {
    waves.clear();
    const json& list = c.raw("waves");
    if (!list.is_array()) throw ConfigError("'waves' must be an array");
    for (const auto& item : list) {
      const Config w(item, "wave", {"xi", "rho", "phase"}, false);
      Wave wave;
      const auto xi = w.numbers("xi", {});
      if (static_cast<int>(xi.size()) > p.n) throw ConfigError("wave xi has more than n components");
      for (std::size_t d = 0; d < xi.size(); ++d) wave.xi[d] = xi[d];
      wave.rho = w.number("rho", 0.0);
      wave.phase = w.number("phase", 0.0);
      waves.push_back(wave);
    }
  }

  VerificationReport rep;
  rep.suite = "symbol";
  for (double sv : orders) {
    p.s = FracOrder(sv);
    for (const auto& w : waves) {
      const AnalyticField f = AnalyticField::coswave(w.xi, w.rho, w.phase);
      const auto sym = complex_power_symbol({w.xi, w.rho}, p.s, Side::left);
      std::vector<double> got, want;
      for (const auto& pt : pts) {
        double arg = w.rho * pt.t + w.phase;
        for (int d = 0; d < p.n; ++d) arg += w.xi[d] * pt.x[d];
        got.push_back(apply_left(f, pt.x, pt.t, p).value);
        want.push_back((sym * std::polar(1.0, arg)).real());
      }
      double err = 0.0;
      for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
      err /= std::max(std::abs(sym), 1e-300);
      CheckRecord rec;
      rec.name = "symbol/plane_wave";
      rec.params = params_json(p);
      rec.params["field"] = f.to_string();
      rec.params["points"] = points_json(pts, p.n);
      rec.samples = {{"operator_values", got}, {"symbol_values", want}};
      rec.fitted = {{"max_relative_error", err}};
      rec.targets = {{"symbol_re", sym.real()}, {"symbol_im", sym.imag()}};
      rec.tolerances = {{"max_relative_error", tol}};
      rec.pass = err < tol;
      rep.checks.push_back(std::move(rec));
    }

    std::vector<double> values, errors;
    for (double lam : lambdas) {
      const double v = gamma_tail_identity(lam, p.s).value;
      const double ref = special::gamma(-sv) * std::pow(lam, sv);
      values.push_back(v);
      errors.push_back(std::abs(v - ref) / std::abs(ref));
    }
    CheckRecord g;
    g.name = "symbol/gamma_identity";
    g.params = {{"s", sv}, {"lambdas", lambdas}};
    g.samples = {{"values", values}, {"relative_errors", errors}};
    g.fitted = {{"max_relative_error", max_of(errors)}};
    g.targets = {{"gamma_of_minus_s", special::gamma(-sv)}};
    g.tolerances = {{"max_relative_error", gamma_tol}};
    g.pass = max_of(errors) < gamma_tol;
    rep.checks.push_back(std::move(g));
  }

  std::vector<double> kernel_errors;
  for (int n = 1; n <= 3; ++n)
    for (double sv : orders)
      for (double r : radii) {
        const double q = time_kernel_integral(r, n, FracOrder(sv)).value;
        const double ref = time_kernel_closed_form(r, n, FracOrder(sv));
        kernel_errors.push_back(std::abs(q - ref) / std::abs(ref));
      }
  CheckRecord k;
  k.name = "symbol/time_kernel";
  k.params = {{"dimensions", {1, 2, 3}}, {"orders", orders}, {"radii", radii}};
  k.samples = {{"relative_errors", kernel_errors}};
  k.fitted = {{"max_relative_error", max_of(kernel_errors)}};
  k.targets = {{"max_relative_error", 0.0}};
  k.tolerances = {{"max_relative_error", kernel_tol}};
  k.pass = max_of(kernel_errors) < kernel_tol;
  rep.checks.push_back(std::move(k));

  // The discrete symbol annihilates the constant mode and nothing else.
  SpaceTimeGrid grid;
  grid.n = p.n;
  grid.Nx = grid.Nt = 16;
  const SampledField sampled = SampledField::sample(AnalyticField::gaussian(1.0), grid);
  const SampledField proj = solve_homogeneous_projection(sampled, p.s);
  const double residual = apply_symbol(proj, p.s, Side::left).max_abs();
  const SpectralPlan plan(grid);
  double smallest = kInf;
  for (std::size_t i = 1; i < grid.size(); ++i)
    smallest = std::min(smallest, std::abs(plan.multiplier(i, p.s, Side::left)));
  CheckRecord l;
  l.name = "symbol/constant_kernel";
  l.params = {{"s", p.s.value()}, {"n", p.n}, {"Nx", grid.Nx}, {"Nt", grid.Nt}};
  l.fitted = {{"projection_residual", residual},
              {"zero_bin_multiplier", std::abs(plan.multiplier(0, p.s, Side::left))},
              {"min_nonzero_bin_multiplier", smallest}};
  l.tolerances = {{"projection_residual", 1e-10}};
  l.pass = residual < 1e-10 && plan.multiplier(0, p.s, Side::left) == 0.0 && smallest > 0.0;
  rep.checks.push_back(std::move(l));
  return rep;
}

VerificationReport suite_greens(const Config& c) {
  const OperatorParams p = params_from(c);
  const GreensKernel kernel = GreensKernel::make(p.n, p.s);
  auto source = std::make_shared<AnalyticField>(
      parse_field(c.string("source", "bump(r1=1,r2=2,t1=1,t2=4,amp=-1)")));
  const auto pts = points_from(c, "points", p.n,
                               {{0.0, 0.0}, {0.5, 0.5}, {-0.5, -0.5}, {1.0, 1.5}, {0.3, -1.0}});
  const double tol = c.number("tolerance", 5e-2);
  const auto times = c.numbers("mass_times", {0.01, 0.1, 1.0, 10.0, 100.0});
  const double mass_tol = c.number("mass_tolerance", 1e-6);

  VerificationReport rep;
  rep.suite = "greens";
  const double res = greens_inversion_residual(source, kernel, p, pts);
  CheckRecord inv;
  inv.name = "greens/inversion";
  inv.params = params_json(p);
  inv.params["source"] = source->to_string();
  inv.params["points"] = points_json(pts, p.n);
  inv.fitted = {{"relative_residual", res}};
  inv.targets = {{"relative_residual", 0.0}};
  inv.tolerances = {{"relative_residual", tol}};
  inv.pass = res < tol;
  rep.checks.push_back(std::move(inv));

  std::vector<double> masses, errors;
  for (double t : times) {
    const double m = space_mass(kernel, t);
    const double ref = std::pow(t, p.s - 1.0) / special::gamma(p.s);
    masses.push_back(m);
    errors.push_back(std::abs(m - ref) / ref);
  }
  CheckRecord mass;
  mass.name = "greens/space_mass";
  mass.params = {{"n", p.n}, {"s", p.s.value()}, {"times", times}};
  mass.samples = {{"masses", masses}, {"relative_errors", errors}};
  mass.fitted = {{"max_relative_error", max_of(errors)}};
  mass.targets = {{"law", "t^(s-1)/Gamma(s)"}};
  mass.tolerances = {{"max_relative_error", mass_tol}};
  mass.pass = max_of(errors) < mass_tol;
  rep.checks.push_back(std::move(mass));
  return rep;
}

VerificationReport suite_membership(const Config& c) {
  const OperatorParams p = params_from(c);
  const AnalyticField f = parse_field(c.string("field", "monomial(axis=1)"));
  const double r_max = c.number("r_max", 64.0);
  const double tol = c.number("tolerance", 0.05);
  const std::string expected =
      c.string("expected", f.known_l2ss_member(p.s) ? "member" : "nonmember");
  if (expected != "member" && expected != "nonmember" && expected != "inconclusive")
    throw ConfigError("'expected' must be member, nonmember or inconclusive");

  const MembershipResult r = membership_L2ss(f, p.n, p.s, r_max, tol);
  CheckRecord rec;
  rec.name = "membership";
  rec.params = {{"field", f.to_string()}, {"n", p.n}, {"s", p.s.value()}, {"r_max", r_max}};
  rec.samples = {{"shell_contributions", r.shell_contributions}, {"shell_ratios", r.shell_ratios}};
  rec.fitted = {{"verdict", to_string(r.verdict)}, {"integral_estimate", number_json(r.integral_estimate)}};
  rec.targets = {{"verdict", expected}};
  rec.tolerances = {{"shell_ratio_margin", tol}};
  rec.pass = expected == to_string(r.verdict);

  VerificationReport rep;
  rep.suite = "membership";
  rep.checks.push_back(std::move(rec));
  return rep;
}

VerificationReport suite_equivalence(const Config& c) {
  const OperatorParams p = params_from(c);
  const GreensKernel kernel = GreensKernel::make(p.n, p.s);
  auto rhs = std::make_shared<AnalyticField>(
      parse_field(c.string("rhs", "bump(r1=1,r2=2,t1=1,t2=4,amp=-1)")));
  const double R = c.number("R", 2.0);
  const double kappa = c.number("kappa", 0.2);
  const double hx = c.number("hx", 0.25), ht = c.number("ht", 0.25);
  const double tol = c.number("tol", Defaults::tol);
  const int max_iter = c.integer("max_iter", 50);
  const auto pts = points_from(c, "points", p.n, {{0.0, 0.0}, {0.5, 1.0}, {-0.7, -0.5}});
  const double res_tol = c.number("residual_tolerance", 5e-2);
  const double ratio_bound = c.number("ratio_bound", 0.9);
  const auto radii = c.numbers("radii", {2.0, 4.0, 8.0});
  auto ladder_field =
      std::make_shared<AnalyticField>(parse_field(c.string("ladder_field", "gaussian(a=0.25)")));
  const double ladder_h = c.number("ladder_h", 0.5);
  const double C = c.number("constant", 1.0);
  const double threshold = c.number("threshold", 1e6);
  const Lattice lattice = Lattice::covering(p.n, R, hx, ht);

  VerificationReport rep;
  rep.suite = "equivalence";

  const NonlinearSource pure{rhs, SourceKind::pure_forcing, 0.0, R};
  const PicardState ps = solve_integral_equation(pure, kernel, lattice, p, tol, max_iter);
  const double pure_res = pde_residual(ps, pure, kernel, p, pts);
  CheckRecord a;
  a.name = "equivalence/pure_forcing";
  a.params = params_json(p);
  a.params["rhs"] = rhs->to_string();
  a.params["R"] = R;
  a.params["points"] = points_json(pts, p.n);
  a.samples = {{"trace", trace_json(ps)}};
  a.fitted = {{"iterations", ps.iterations}, {"pde_residual", pure_res}};
  a.targets = {{"iterations", 1}};
  a.tolerances = {{"pde_residual", res_tol}};
  a.pass = ps.converged && ps.iterations == 1 && pure_res < res_tol;
  rep.checks.push_back(std::move(a));

  const NonlinearSource con{rhs, SourceKind::contraction, kappa, R};
  const PicardState cs = solve_integral_equation(con, kernel, lattice, p, tol, max_iter);
  const double con_res = pde_residual(cs, con, kernel, p, pts);
  const auto ratios = cs.ratios();
  CheckRecord b;
  b.name = "equivalence/contraction";
  b.params = params_json(p);
  b.params["rhs"] = rhs->to_string();
  b.params["R"] = R;
  b.params["kappa"] = kappa;
  b.samples = {{"trace", trace_json(cs)}, {"ratios", ratios}};
  b.fitted = {{"iterations", cs.iterations},
              {"contraction_constant", cs.contraction_constant},
              {"max_ratio", max_of(ratios)},
              {"pde_residual", con_res}};
  b.tolerances = {{"ratio_bound", ratio_bound}, {"pde_residual", res_tol}};
  b.pass = cs.converged && max_of(ratios) < ratio_bound && con_res < res_tol;
  rep.checks.push_back(std::move(b));

  const RadiusLadder ladder = monotone_in_radius(
      ladder_field, kernel, radii, Lattice::covering(p.n, radii.front(), ladder_h, ladder_h), p);
  CheckRecord m;
  m.name = "equivalence/monotone_in_R";
  m.params = {{"field", ladder_field->to_string()}, {"radii", radii}, {"n", p.n}, {"s", p.s.value()}};
  m.fitted = {{"worst_violation", ladder.worst_violation}};
  m.tolerances = {{"worst_violation", 1e-9}};
  m.pass = ladder.monotone;
  rep.checks.push_back(std::move(m));

  const DivergenceCertificate cert = nontrivial_constant_rejection(kernel, C, threshold);
  const double expect = C != 0.0 ? std::pow(threshold * special::gamma(p.s + 1.0), 1.0 / p.s) : kInf;
  CheckRecord d;
  d.name = "equivalence/constant_rejection";
  d.params = {{"constant", C}, {"threshold", threshold}, {"s", p.s.value()}};
  d.samples = {{"horizons", cert.horizons}, {"values", cert.values}};
  d.fitted = {{"T_star", number_json(cert.T_star)},
              {"max_doubling_error", cert.max_doubling_error}};
  d.targets = {{"T_star", number_json(expect)},
               {"doubling_ratio", std::pow(2.0, p.s.value())}};
  d.tolerances = {{"T_star_relative", 1e-6}, {"doubling_ratio", 1e-9}};
  d.pass = C == 0.0 ? !std::isfinite(cert.T_star)
                    : std::abs(cert.T_star - expect) <= 1e-6 * expect &&
                          cert.max_doubling_error < 1e-9;
  rep.checks.push_back(std::move(d));
  return rep;
}

// ---------------------------------------------------------------------------
// Commands

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::vector<SpaceTimePoint> read_points_csv(const std::string& path, int n) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open points file " + path);
  std::vector<SpaceTimePoint> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (out.empty() && lineno == 1) continue;  // header
      throw ConfigError("points file line " + std::to_string(lineno) + " is not numeric");
    }
    if (static_cast<int>(vals.size()) != n + 1)
      throw ConfigError("points file line " + std::to_string(lineno) + " needs " +
                        std::to_string(n + 1) + " columns");
    SpaceTimePoint p{{0.0, 0.0, 0.0}, vals.back()};
    for (int d = 0; d < n; ++d) p.x[d] = vals[d];
    out.push_back(p);
  }
  return out;
}

void write_rows(const std::string& path, int n, const std::vector<CsvRow>& rows,
                std::ostream& fallback) {
  if (path.empty() || path == "-") {
    write_csv(fallback, n, rows);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file " + path);
  write_csv(os, n, rows);
}

struct ApplyOptions {
  std::string method = "quad";
  std::string field;
  double s = Defaults::s;
  int n = Defaults::n;
  std::string points;
  std::string side = "left";
  std::string out;
  double delta = Defaults::delta;
  int time_nodes = Defaults::n_time_nodes;
  int space_nodes = Defaults::n_space_nodes;
  bool check_convergence = false;
  double Lx = 2.0 * std::numbers::pi, Lt = 2.0 * std::numbers::pi;
  int Nx = 64, Nt = 64;
};

int cmd_apply(const ApplyOptions& o, std::ostream& out) {
  const AnalyticField f = parse_field(o.field);
  OperatorParams p;
  p.s = FracOrder(o.s);
  p.n = checked_dimension(o.n);
  p.delta = o.delta;
  p.n_time_nodes = o.time_nodes;
  p.n_space_nodes = o.space_nodes;
  p.check_convergence = o.check_convergence;
  p.validate();
  const Side side = o.side == "left" ? Side::left : Side::right;
  const auto pts = read_points_csv(o.points, p.n);

  std::vector<CsvRow> rows(pts.size());
  if (o.method == "quad") {
    parallel_for(pts.size(), [&](std::size_t i) {
      rows[i] = {pts[i].x, pts[i].t, apply_operator(f, pts[i].x, pts[i].t, p, side).value};
    });
  } else {
    SpaceTimeGrid grid;
    grid.n = p.n;
    grid.Lx = o.Lx;
    grid.Lt = o.Lt;
    grid.Nx = o.Nx;
    grid.Nt = o.Nt;
    grid.validate();
    require_commensurate(f, grid);
    const SpectralPlan plan(grid);
    const SampledField g = apply_symbol(plan, SampledField::sample(f, grid), p.s, side);
    for (std::size_t i = 0; i < pts.size(); ++i)
      rows[i] = {pts[i].x, pts[i].t, trig_interpolate(plan, g, pts[i].x, pts[i].t).real()};
  }
  write_rows(o.out, p.n, rows, out);
  return kOk;
}

struct VerifyOptions {
  std::string suite;
  std::string config;
  std::string report;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  const json doc = o.config.empty() ? json::object() : read_json_file(o.config);
  const std::string& s = o.suite;
  auto cfg = [&](std::vector<std::string> keys) { return Config(doc, "config", keys); };
  VerificationReport rep;
  if (s == "decay") rep = suite_decay(cfg({"field", "rays", "tolerance"}));
  else if (s == "counterexample")
    rep = suite_counterexample(cfg({"bump", "times", "slope_tolerance", "cases"}));
  else if (s == "reduction")
    rep = suite_reduction(cfg({"points", "limit_points", "tolerance", "limit_tolerance",
                               "space_field", "time_field", "limit_field"}));
  else if (s == "symbol")
    rep = suite_symbol(cfg({"orders", "points", "tolerance", "waves", "lambdas", "gamma_tolerance",
                            "radii", "kernel_tolerance"}));
  else if (s == "greens")
    rep = suite_greens(cfg({"source", "points", "tolerance", "mass_times", "mass_tolerance"}));
  else if (s == "membership")
    rep = suite_membership(cfg({"field", "r_max", "tolerance", "expected"}));
  else
    rep = suite_equivalence(cfg({"rhs", "R", "kappa", "hx", "ht", "tol", "max_iter", "points",
                                 "residual_tolerance", "ratio_bound", "radii", "ladder_field",
                                 "ladder_h", "constant", "threshold"}));

  if (o.report.empty() || o.report == "-") rep.write(out);
  else rep.write_file(o.report);
  for (const auto& chk : rep.checks)
    out << (chk.pass ? "PASS " : "FAIL ") << chk.name
        << (chk.diagnostic.empty() ? "" : " (" + chk.diagnostic + ")") << '\n';
  return rep.pass() ? kOk : kVerificationFailed;
}

struct SolveOptions {
  std::string rhs;
  std::string kind = "pure";
  double kappa = 0.0;
  double R = 2.0;
  double s = Defaults::s;
  int n = Defaults::n;
  double hx = 0.25, ht = 0.25;
  double tol = Defaults::tol;
  int max_iter = 50;
  std::string out;
  std::string trace;
};

int cmd_solve(const SolveOptions& o, std::ostream& out) {
  auto g = std::make_shared<AnalyticField>(parse_field(o.rhs));
  const GreensKernel kernel = GreensKernel::make(checked_dimension(o.n), FracOrder(o.s));
  OperatorParams p;
  p.n = o.n;
  p.s = FracOrder(o.s);
  const NonlinearSource src{g, o.kind == "pure" ? SourceKind::pure_forcing : SourceKind::contraction,
                            o.kappa, o.R};
  const Lattice lattice = Lattice::covering(o.n, o.R, o.hx, o.ht);
  const PicardState st = solve_integral_equation(src, kernel, lattice, p, o.tol, o.max_iter);

  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const SpaceTimePoint pt = lattice.point(i);
    rows.push_back({pt.x, pt.t, st.values[i]});
  }
  if (!o.out.empty()) write_rows(o.out, o.n, rows, out);
  const std::string trace = trace_json(st).dump() + "\n";
  if (!o.trace.empty()) {
    std::ofstream os(o.trace, std::ios::binary);
    if (!os) throw ConfigError("cannot open trace file " + o.trace);
    os << trace;
  }
  out << "iterations " << st.iterations << "\ncontraction_constant " << st.contraction_constant
      << "\ntrace " << trace;
  return kOk;
}

void diagnose(std::ostream& err, const std::string& kind, const std::string& message,
              ojson extra = ojson::object()) {
  ojson d;
  d["error"] = kind;
  d["message"] = message;
  for (auto& [k, v] : extra.items()) d[k] = v;
  err << d.dump() << '\n';
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      throw ConfigError(std::string(kThreadsEnv) + " must be a non-negative integer");
    return static_cast<int>(v);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fully fractional heat operator toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (overrides FRACHEAT_THREADS)")
      ->check(CLI::NonNegativeNumber);

  ApplyOptions ao;
  auto* apply = app.add_subcommand("apply", "evaluate the operator at points");
  apply->add_option("--method", ao.method)->check(CLI::IsMember({"quad", "spectral"}));
  apply->add_option("--field", ao.field, "field in the mini-language")->required();
  apply->add_option("--s", ao.s);
  apply->add_option("--n", ao.n);
  apply->add_option("--points", ao.points, "CSV of x1..xn,t")->required();
  apply->add_option("--side", ao.side)->check(CLI::IsMember({"left", "right"}));
  apply->add_option("--out", ao.out, "output CSV (stdout when omitted)");
  apply->add_option("--delta", ao.delta);
  apply->add_option("--time-nodes", ao.time_nodes);
  apply->add_option("--space-nodes", ao.space_nodes);
  apply->add_flag("--check-convergence", ao.check_convergence);
  apply->add_option("--Lx", ao.Lx, "spectral period in space");
  apply->add_option("--Lt", ao.Lt, "spectral period in time");
  apply->add_option("--Nx", ao.Nx);
  apply->add_option("--Nt", ao.Nt);

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", vo.suite)
      ->required()
      ->check(CLI::IsMember({"decay", "counterexample", "reduction", "symbol", "greens",
                             "membership", "equivalence"}));
  verify->add_option("--config", vo.config, "JSON config (defaults when omitted)");
  verify->add_option("--report", vo.report, "report JSON path (stdout when omitted)");

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "solve the truncated integral equation");
  solve->add_option("--rhs", so.rhs, "forcing g in the mini-language")->required();
  solve->add_option("--kind", so.kind)->check(CLI::IsMember({"pure", "contraction"}));
  solve->add_option("--kappa", so.kappa);
  solve->add_option("--R", so.R);
  solve->add_option("--s", so.s);
  solve->add_option("--n", so.n);
  solve->add_option("--hx", so.hx, "lattice spacing in space");
  solve->add_option("--ht", so.ht, "lattice spacing in time");
  solve->add_option("--tol", so.tol);
  solve->add_option("--max-iter", so.max_iter);
  solve->add_option("--out", so.out, "lattice solution CSV");
  solve->add_option("--trace", so.trace, "iteration trace JSON");

  std::vector<std::string> argv_store{"fracheat"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    diagnose(err, "usage", e.what());
    return kConfigError;
  }

  try {
    set_thread_count(resolve_threads(threads));
    if (apply->parsed()) return cmd_apply(ao, out);
    if (verify->parsed()) return cmd_verify(vo, out);
    return cmd_solve(so, out);
  } catch (const ParseError& e) {
    diagnose(err, "parse", e.what(), {{"token", e.token()}});
    return kConfigError;
  } catch (const NotContracting& e) {
    diagnose(err, "not_contracting", e.what(), {{"constant", e.constant()}});
    return kNotContracting;
  } catch (const DidNotConverge& e) {
    diagnose(err, "did_not_converge", e.what());
    return kNotConverged;
  } catch (const MaxIterExceeded& e) {
    diagnose(err, "max_iter_exceeded", e.what());
    return kNotConverged;
  } catch (const ConfigError& e) {
    diagnose(err, "config", e.what());
    return kConfigError;
  } catch (const InvalidArgument& e) {
    diagnose(err, "invalid_argument", e.what());
    return kConfigError;
  } catch (const IncommensurateFrequency& e) {
    diagnose(err, "incommensurate_frequency", e.what());
    return kConfigError;
  } catch (const json::exception& e) {
    diagnose(err, "config", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    diagnose(err, "failure", e.what());
    return kVerificationFailed;
  }
}

}  // namespace fracheat::cli
