#include "fracheat/field.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "fracheat/gauss_rules.hpp"
#include "fracheat/jet.hpp"
#include "fracheat/special.hpp"

namespace fracheat {

namespace {

constexpr double kWindowLog = 40.0;  // exp(-40) ~ 4e-18
constexpr double kPruneWeight = 1e-22;
constexpr double kCutTarget = 1e-10;

double norm2(const Point& x, int n) {
  double r = 0.0;
  for (int i = 0; i < n; ++i) r += x[i] * x[i];
  return r;
}

struct WeightedNode {
  Point z;
  double w;
};

// Normalised tensor Gauss-Hermite nodes for pi^{-n/2} int e^{-|z|^2} g(z) dz.
const std::vector<WeightedNode>& hermite_tensor(int n, int nodes) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<WeightedNode>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, nodes}];
  if (!slot) {
    const Rule& r = cached_hermite(nodes);
    const double norm = std::pow(std::numbers::pi, 0.5 * n);
    auto out = std::make_unique<std::vector<WeightedNode>>();
    const int m = static_cast<int>(r.size());
    int count = 1;
    for (int d = 0; d < n; ++d) count *= m;
    for (int idx = 0; idx < count; ++idx) {
      int rem = idx;
      WeightedNode node{{0.0, 0.0, 0.0}, 1.0 / norm};
      for (int d = 0; d < n; ++d) {
        const int k = rem % m;
        rem /= m;
        node.z[d] = r.nodes[k];
        node.w *= r.weights[k];
      }
      if (node.w >= kPruneWeight) out->push_back(node);
    }
    slot = std::move(out);
  }
  return *slot;
}

// Tensor product of per-axis rules, shifted by `centre`, keeping nodes with keep(y).
template <class Keep>
std::shared_ptr<const SpatialRule> tensor_rule(const Rule& axis, int n, const Point& centre,
                                               Keep keep) {
  auto rule = std::make_shared<SpatialRule>();
  const int m = static_cast<int>(axis.size());
  int count = 1;
  for (int d = 0; d < n; ++d) count *= m;
  for (int idx = 0; idx < count; ++idx) {
    int rem = idx;
    Point y{0.0, 0.0, 0.0};
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      const int k = rem % m;
      rem /= m;
      y[d] = axis.nodes[k];
      w *= axis.weights[k];
    }
    if (!keep(y, w)) continue;
    for (int d = 0; d < n; ++d) y[d] += centre[d];
    rule->nodes.push_back(y);
    rule->weights.push_back(w);
  }
  return rule;
}

Rule concat_panels(const std::vector<double>& breaks, int per_panel) {
  Rule out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Rule p = legendre_on(breaks[i], breaks[i + 1], per_panel);
    out.nodes.insert(out.nodes.end(), p.nodes.begin(), p.nodes.end());
    out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
  }
  return out;
}

std::vector<double> linspace_breaks(double a, double b, int pieces) {
  std::vector<double> v;
  for (int i = 0; i <= pieces; ++i) v.push_back(a + (b - a) * i / pieces);
  return v;
}

// Radial profile of the bump: 1 on [0, r1], 0 beyond r2.
Jet2 bump_profile(double r, double r1, double r2) {
  const Jet2 u = (1.0 / (r2 - r1)) * (Jet2::variable(r) - Jet2::constant(r1));
  return 1.0 - smooth_step(u);
}

}  // namespace

// ---------------------------------------------------------------------------
// Field defaults

double Field::heat_difference(const Point& x, double t, double u0, double sigma, Side side, int n,
                              int nodes) const {
  if (is_constant()) return u0 - value(x, t);
  const double tau = side == Side::left ? t - sigma : t + sigma;
  const double spread = 2.0 * std::sqrt(sigma);
  if (spread > space_scale()) {
    if (auto rule = spatial_rule(n, nodes)) {
      // Kernel-weighted sum over field-adapted nodes.
      const double norm = std::pow(4.0 * std::numbers::pi * sigma, -0.5 * n);
      const double inv4s = 1.0 / (4.0 * sigma);
      double m = 0.0;
      for (std::size_t j = 0; j < rule->nodes.size(); ++j) {
        const Point& y = rule->nodes[j];
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += (x[d] - y[d]) * (x[d] - y[d]);
        const double k = std::exp(-r2 * inv4s);
        if (k == 0.0) continue;
        m += rule->weights[j] * k * value(y, tau);
      }
      return u0 - norm * m;
    }
  }
  const auto& tensor = hermite_tensor(n, nodes);
  double acc = 0.0;
  for (const auto& node : tensor) {
    Point y = x;
    for (int d = 0; d < n; ++d) y[d] += spread * node.z[d];
    acc += node.w * (u0 - value(y, tau));
  }
  return acc;
}

TailEstimate Field::history_tail(const Point& x, double t, double cut, double s, Side /*side*/,
                                 int n) const {
  const double u0 = value(x, t);
  const double ps = std::pow(cut, -s);
  double bound = sup_abs() * ps / s;
  const double l1 = spatial_l1_bound(n);
  if (std::isfinite(l1)) {
    const double q = s + 0.5 * n;
    bound = std::min(bound, l1 * std::pow(4.0 * std::numbers::pi, -0.5 * n) * std::pow(cut, -q) / q);
  }
  return {u0 * ps / s, bound};
}

double Field::suggested_cut(const Point& /*x*/, double /*t*/, double s, Side /*side*/,
                            int n) const {
  const double l1 = spatial_l1_bound(n);
  if (std::isfinite(l1)) {
    const double q = s + 0.5 * n;
    const double c = l1 * std::pow(4.0 * std::numbers::pi, -0.5 * n) / q;
    return std::pow(c / kCutTarget, 1.0 / q);
  }
  const double m = std::isfinite(sup_abs()) ? sup_abs() : 1.0;
  return std::pow(m / (s * kCutTarget), 1.0 / s);
}

double fd_time_derivative(const Field& f, const Point& x, double t, double h) {
  return (f.value(x, t + h) - f.value(x, t - h)) / (2.0 * h);
}

double fd_laplacian(const Field& f, const Point& x, double t, int n, double h) {
  const double c = f.value(x, t);
  double acc = 0.0;
  for (int d = 0; d < n; ++d) {
    Point p = x, m = x;
    p[d] += h;
    m[d] -= h;
    acc += (f.value(p, t) - 2.0 * c + f.value(m, t)) / (h * h);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// AnalyticField

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::constant: return "constant";
    case FieldKind::coswave: return "coswave";
    case FieldKind::gaussian: return "gaussian";
    case FieldKind::bump: return "bump";
    case FieldKind::monomial: return "monomial";
    case FieldKind::schwartz_product: return "schwartz_product";
  }
  return "?";
}

namespace {

std::vector<std::string> allowed_keys(FieldKind kind) {
  std::vector<std::string> keys = {"amp", "x0", "x01", "x02", "x03", "t0"};
  switch (kind) {
    case FieldKind::constant: keys.push_back("c"); break;
    case FieldKind::coswave:
      for (const char* k : {"xi", "xi1", "xi2", "xi3", "rho", "phase"}) keys.push_back(k);
      break;
    case FieldKind::gaussian: keys.push_back("a"); break;
    case FieldKind::bump:
      for (const char* k : {"r1", "r2", "t1", "t2"}) keys.push_back(k);
      break;
    case FieldKind::monomial: keys.push_back("axis"); break;
    case FieldKind::schwartz_product:
      keys.push_back("a");
      keys.push_back("b");
      break;
  }
  return keys;
}

}  // namespace

AnalyticField::AnalyticField(FieldKind kind, std::vector<std::pair<std::string, double>> params)
    : kind_(kind), raw_(std::move(params)) {
  finish_construction();
}

void AnalyticField::finish_construction() {
  const auto keys = allowed_keys(kind_);
  auto get = [&](const std::string& key, double dflt) {
    double v = dflt;
    for (const auto& [k, val] : raw_)
      if (k == key) v = val;
    return v;
  };
  for (const auto& [k, val] : raw_) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ParseError(std::string("unknown key '") + k + "' for " + fracheat::to_string(kind_), k);
    if (!std::isfinite(val)) throw ParseError("non-finite value for key '" + k + "'", k);
  }
  amp_ = get("amp", 1.0);
  x0_ = {get("x01", get("x0", 0.0)), get("x02", 0.0), get("x03", 0.0)};
  t0_ = get("t0", 0.0);
  switch (kind_) {
    case FieldKind::constant: c_ = get("c", 1.0); break;
    case FieldKind::coswave:
      xi_ = {get("xi1", get("xi", 0.0)), get("xi2", 0.0), get("xi3", 0.0)};
      rho_ = get("rho", 0.0);
      phase_ = get("phase", 0.0);
      break;
    case FieldKind::gaussian:
      a_ = b_ = get("a", 1.0);
      if (a_ < 0.0) throw ParseError("gaussian requires a >= 0", "a");
      break;
    case FieldKind::schwartz_product:
      a_ = get("a", 1.0);
      b_ = get("b", 1.0);
      if (a_ < 0.0 || b_ < 0.0) throw ParseError("schwartz_product requires a, b >= 0", "a");
      break;
    case FieldKind::bump:
      r1_ = get("r1", 1.0);
      r2_ = get("r2", 2.0);
      t1_ = get("t1", 1.0);
      t2_ = get("t2", 4.0);
      if (!(r1_ > 0.0 && r2_ > r1_)) throw ParseError("bump requires 0 < r1 < r2", "r2");
      if (!(t1_ > 0.0 && t2_ > t1_)) throw ParseError("bump requires 0 < t1 < t2", "t2");
      break;
    case FieldKind::monomial: {
      const double ax = get("axis", 1.0);
      if (ax != 1.0 && ax != 2.0 && ax != 3.0)
        throw ParseError("monomial axis must be 1, 2 or 3", "axis");
      axis_ = static_cast<int>(ax) - 1;
      break;
    }
  }
}

AnalyticField AnalyticField::constant(double c) { return {FieldKind::constant, {{"c", c}}}; }
AnalyticField AnalyticField::coswave(const Point& xi, double rho, double phase) {
  return {FieldKind::coswave,
          {{"xi1", xi[0]}, {"xi2", xi[1]}, {"xi3", xi[2]}, {"rho", rho}, {"phase", phase}}};
}
AnalyticField AnalyticField::gaussian(double a) { return {FieldKind::gaussian, {{"a", a}}}; }
AnalyticField AnalyticField::bump(double r1, double r2, double t1, double t2) {
  return {FieldKind::bump, {{"r1", r1}, {"r2", r2}, {"t1", t1}, {"t2", t2}}};
}
AnalyticField AnalyticField::monomial(int axis) {
  return {FieldKind::monomial, {{"axis", static_cast<double>(axis)}}};
}
AnalyticField AnalyticField::schwartz_product(double a, double b) {
  return {FieldKind::schwartz_product, {{"a", a}, {"b", b}}};
}

AnalyticField AnalyticField::scaled(double amp) const {
  auto params = raw_;
  std::erase_if(params, [](const auto& kv) { return kv.first == "amp"; });
  params.emplace_back("amp", amp_ * amp);
  return {kind_, std::move(params)};
}

AnalyticField AnalyticField::shifted(const Point& dx, double dt) const {
  auto params = raw_;
  std::erase_if(params, [](const auto& kv) {
    return kv.first == "x0" || kv.first == "x01" || kv.first == "x02" || kv.first == "x03" ||
           kv.first == "t0";
  });
  params.emplace_back("x01", x0_[0] + dx[0]);
  params.emplace_back("x02", x0_[1] + dx[1]);
  params.emplace_back("x03", x0_[2] + dx[2]);
  params.emplace_back("t0", t0_ + dt);
  return {kind_, std::move(params)};
}

double AnalyticField::param(const std::string& key) const {
  for (const auto& [k, v] : raw_)
    if (k == key) return v;
  throw InvalidArgument("field has no parameter '" + key + "'");
}

std::string AnalyticField::to_string() const {
  std::ostringstream os;
  os << fracheat::to_string(kind_) << '(';
  char buf[64];
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", raw_[i].second);
    os << (i ? "," : "") << raw_[i].first << '=' << buf;
  }
  os << ')';
  return os.str();
}

bool AnalyticField::known_l2ss_member(double s) const {
  if (kind_ == FieldKind::monomial) return s > 0.5;
  return true;
}

bool AnalyticField::is_constant() const {
  switch (kind_) {
    case FieldKind::constant: return true;
    case FieldKind::coswave: return xi_[0] == 0.0 && xi_[1] == 0.0 && xi_[2] == 0.0 && rho_ == 0.0;
    case FieldKind::gaussian:
    case FieldKind::schwartz_product: return a_ == 0.0 && b_ == 0.0;
    default: return amp_ == 0.0;
  }
}

double AnalyticField::value(const Point& xin, double tin) const {
  Point x{xin[0] - x0_[0], xin[1] - x0_[1], xin[2] - x0_[2]};
  const double t = tin - t0_;
  switch (kind_) {
    case FieldKind::constant: return amp_ * c_;
    case FieldKind::coswave:
      return amp_ * std::cos(xi_[0] * x[0] + xi_[1] * x[1] + xi_[2] * x[2] + rho_ * t + phase_);
    case FieldKind::gaussian:
    case FieldKind::schwartz_product:
      return amp_ * std::exp(-a_ * norm2(x, 3) - b_ * t * t);
    case FieldKind::bump: {
      const double r = std::sqrt(norm2(x, 3));
      if (r >= r2_ || std::abs(t) >= t2_) return 0.0;
      return -amp_ * bump_profile(r, r1_, r2_).v * bump_profile(std::abs(t), t1_, t2_).v;
    }
    case FieldKind::monomial: return amp_ * x[axis_];
  }
  return 0.0;
}

double AnalyticField::time_derivative(const Point& xin, double tin) const {
  Point x{xin[0] - x0_[0], xin[1] - x0_[1], xin[2] - x0_[2]};
  const double t = tin - t0_;
  switch (kind_) {
    case FieldKind::constant:
    case FieldKind::monomial: return 0.0;
    case FieldKind::coswave:
      return -amp_ * rho_ *
             std::sin(xi_[0] * x[0] + xi_[1] * x[1] + xi_[2] * x[2] + rho_ * t + phase_);
    case FieldKind::gaussian:
    case FieldKind::schwartz_product:
      return -2.0 * b_ * t * amp_ * std::exp(-a_ * norm2(x, 3) - b_ * t * t);
    case FieldKind::bump: {
      const double r = std::sqrt(norm2(x, 3));
      if (r >= r2_ || std::abs(t) >= t2_) return 0.0;
      const Jet2 pt = bump_profile(std::abs(t), t1_, t2_);
      const double sgn = t < 0.0 ? -1.0 : 1.0;
      return -amp_ * bump_profile(r, r1_, r2_).v * pt.d1 * sgn;
    }
  }
  return 0.0;
}

double AnalyticField::laplacian(const Point& xin, double tin, int n) const {
  Point x{xin[0] - x0_[0], xin[1] - x0_[1], xin[2] - x0_[2]};
  const double t = tin - t0_;
  switch (kind_) {
    case FieldKind::constant:
    case FieldKind::monomial: return 0.0;
    case FieldKind::coswave: {
      double k2 = 0.0;
      for (int d = 0; d < n; ++d) k2 += xi_[d] * xi_[d];
      return -k2 * amp_ * std::cos(xi_[0] * x[0] + xi_[1] * x[1] + xi_[2] * x[2] + rho_ * t + phase_);
    }
    case FieldKind::gaussian:
    case FieldKind::schwartz_product: {
      const double u = amp_ * std::exp(-a_ * norm2(x, 3) - b_ * t * t);
      return (4.0 * a_ * a_ * norm2(x, n) - 2.0 * a_ * n) * u;
    }
    case FieldKind::bump: {
      const double r = std::sqrt(norm2(x, 3));
      if (r >= r2_ || std::abs(t) >= t2_ || r <= r1_) return 0.0;
      const Jet2 pr = bump_profile(r, r1_, r2_);
      const double radial = pr.d2 + (n - 1) * pr.d1 / r;
      return -amp_ * radial * bump_profile(std::abs(t), t1_, t2_).v;
    }
  }
  return 0.0;
}

double AnalyticField::time_scale() const {
  switch (kind_) {
    case FieldKind::coswave: return rho_ != 0.0 ? 1.0 / std::abs(rho_) : kInf;
    case FieldKind::gaussian:
    case FieldKind::schwartz_product: return b_ > 0.0 ? 1.0 / std::sqrt(b_) : kInf;
    case FieldKind::bump: return (t2_ - t1_) / 16.0;
    default: return kInf;
  }
}

double AnalyticField::space_scale() const {
  switch (kind_) {
    case FieldKind::coswave: {
      const double k = std::sqrt(norm2(xi_, 3));
      return k > 0.0 ? 1.0 / k : kInf;
    }
    case FieldKind::gaussian:
    case FieldKind::schwartz_product: return a_ > 0.0 ? 1.0 / std::sqrt(a_) : kInf;
    case FieldKind::bump: return (r2_ - r1_) / 4.0;
    default: return kInf;
  }
}

std::optional<TimeWindow> AnalyticField::time_window() const {
  switch (kind_) {
    case FieldKind::gaussian:
    case FieldKind::schwartz_product:
      if (b_ > 0.0) {
        const double w = std::sqrt(kWindowLog / b_);
        return TimeWindow{t0_ - w, t0_ + w};
      }
      return std::nullopt;
    case FieldKind::bump: return TimeWindow{t0_ - t2_, t0_ + t2_};
    default: return std::nullopt;
  }
}

std::shared_ptr<const SpatialRule> AnalyticField::spatial_rule(int n, int nodes) const {
  const bool localized =
      kind_ == FieldKind::bump ||
      ((kind_ == FieldKind::gaussian || kind_ == FieldKind::schwartz_product) && a_ > 0.0);
  if (!localized) return nullptr;
  std::lock_guard lock(cache_.mutex);
  auto& slot = cache_.rules[{n, nodes}];
  if (slot) return slot;
  if (kind_ == FieldKind::bump) {
    const int per = std::max(4, nodes / 3);
    std::vector<double> breaks = linspace_breaks(-r2_, -r1_, 4);
    for (double b : linspace_breaks(-r1_, r1_, 2)) breaks.push_back(b);
    for (double b : linspace_breaks(r1_, r2_, 4)) breaks.push_back(b);
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const Rule axis = concat_panels(breaks, per);
    const double r2sq = r2_ * r2_;
    slot = tensor_rule(axis, n, x0_, [&](const Point& y, double) {
      return norm2(y, n) < r2sq;
    });
  } else {
    // Gauss-Hermite nodes scaled to exp(-a|y|^2); the weight is divided back out.
    const Rule& h = cached_hermite(nodes);
    Rule axis;
    const double scale = 1.0 / std::sqrt(a_);
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (h.weights[k] < kPruneWeight) continue;
      axis.nodes.push_back(h.nodes[k] * scale);
      axis.weights.push_back(h.weights[k] * std::exp(h.nodes[k] * h.nodes[k]) * scale);
    }
    slot = tensor_rule(axis, n, x0_, [&](const Point& y, double) {
      return a_ * norm2(y, n) < 80.0;
    });
  }
  return slot;
}

double AnalyticField::sup_abs() const {
  switch (kind_) {
    case FieldKind::constant: return std::abs(amp_ * c_);
    case FieldKind::monomial: return amp_ == 0.0 ? 0.0 : kInf;
    default: return std::abs(amp_);
  }
}

double AnalyticField::spatial_l1_bound(int n) const {
  switch (kind_) {
    case FieldKind::gaussian:
    case FieldKind::schwartz_product:
      return a_ > 0.0 ? std::abs(amp_) * std::pow(std::numbers::pi / a_, 0.5 * n) : kInf;
    case FieldKind::bump: return std::abs(amp_) * std::pow(2.0 * r2_, n);
    default: return kInf;
  }
}

TailEstimate AnalyticField::history_tail(const Point& x, double t, double cut, double s,
                                         Side side, int n) const {
  if (is_constant() || kind_ == FieldKind::monomial) return {0.0, 0.0};
  if (kind_ == FieldKind::coswave) {
    // M(sigma) = amp Re[e^{i theta} e^{-lambda sigma}], lambda = |xi|^2 +/- i rho.
    double k2 = 0.0;
    for (int d = 0; d < n; ++d) k2 += xi_[d] * xi_[d];
    const std::complex<double> lambda(k2, side == Side::left ? rho_ : -rho_);
    const double theta = xi_[0] * (x[0] - x0_[0]) + xi_[1] * (x[1] - x0_[1]) +
                         xi_[2] * (x[2] - x0_[2]) + rho_ * (t - t0_) + phase_;
    const double u0 = amp_ * std::cos(theta);
    const std::complex<double> tail = special::cpow_principal(lambda, s) *
                                      special::upper_incomplete_gamma(-s, lambda * cut);
    const double m_tail = amp_ * (std::polar(1.0, theta) * tail).real();
    return {u0 * std::pow(cut, -s) / s - m_tail, 0.0};
  }
  return Field::history_tail(x, t, cut, s, side, n);
}

double AnalyticField::suggested_cut(const Point& x, double t, double s, Side side, int n) const {
  if (is_constant() || kind_ == FieldKind::monomial) return 1.0;
  if (kind_ == FieldKind::coswave) {
    double k2 = 0.0;
    for (int d = 0; d < n; ++d) k2 += xi_[d] * xi_[d];
    // Keep the Hermite spread 2 sqrt(sigma)|xi| within what the z-rule resolves;
    // the closed-form tail covers the rest.
    const double cut = 40.0 / std::hypot(k2, rho_);
    return k2 > 0.0 ? std::min(cut, 4.0 / k2) : cut;
  }
  return Field::suggested_cut(x, t, s, side, n);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }
  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  double number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.' || text_[pos_] == '-' || text_[pos_] == '+'))
      ++pos_;
    const std::string tok = text_.substr(start, pos_ - start);
    if (tok.empty()) fail("expected number");
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("invalid number '" + tok + "'", tok);
    }
  }
  [[noreturn]] void fail(const std::string& what) {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])) &&
           text_[end] != ',' && text_[end] != ')')
      ++end;
    std::string tok = pos_ < text_.size() ? text_.substr(pos_, std::max<std::size_t>(1, end - pos_))
                                          : std::string("<end of input>");
    throw ParseError(what + " at '" + tok + "' (offset " + std::to_string(pos_) + ")", tok);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

AnalyticField parse_field(const std::string& text) {
  Lexer lex(text);
  const std::string name = lex.ident();
  FieldKind kind;
  if (name == "constant") kind = FieldKind::constant;
  else if (name == "coswave") kind = FieldKind::coswave;
  else if (name == "gaussian") kind = FieldKind::gaussian;
  else if (name == "bump") kind = FieldKind::bump;
  else if (name == "monomial") kind = FieldKind::monomial;
  else if (name == "schwartz_product") kind = FieldKind::schwartz_product;
  else throw ParseError("unknown field kind '" + name + "'", name);

  lex.expect('(');
  std::vector<std::pair<std::string, double>> params;
  if (!lex.peek(')')) {
    while (true) {
      std::string key = lex.ident();
      lex.expect('=');
      const double v = lex.number();
      for (const auto& kv : params)
        if (kv.first == key) throw ParseError("duplicate key '" + key + "'", key);
      params.emplace_back(std::move(key), v);
      if (lex.peek(',')) {
        lex.expect(',');
        continue;
      }
      break;
    }
  }
  lex.expect(')');
  if (!lex.done()) lex.fail("trailing input");
  return AnalyticField(kind, std::move(params));
}

// ---------------------------------------------------------------------------
// LinearCombination

void LinearCombination::add(double coeff, std::shared_ptr<const Field> field) {
  terms_.emplace_back(coeff, std::move(field));
}

double LinearCombination::value(const Point& x, double t) const {
  double v = 0.0;
  for (const auto& [c, f] : terms_) v += c * f->value(x, t);
  return v;
}
double LinearCombination::time_derivative(const Point& x, double t) const {
  double v = 0.0;
  for (const auto& [c, f] : terms_) v += c * f->time_derivative(x, t);
  return v;
}
double LinearCombination::laplacian(const Point& x, double t, int n) const {
  double v = 0.0;
  for (const auto& [c, f] : terms_) v += c * f->laplacian(x, t, n);
  return v;
}
double LinearCombination::time_scale() const {
  double h = kInf;
  for (const auto& term : terms_) h = std::min(h, term.second->time_scale());
  return h;
}
double LinearCombination::space_scale() const {
  double h = kInf;
  for (const auto& term : terms_) h = std::min(h, term.second->space_scale());
  return h;
}
std::optional<TimeWindow> LinearCombination::time_window() const {
  TimeWindow w{kInf, -kInf};
  for (const auto& term : terms_) {
    const auto tw = term.second->time_window();
    if (!tw) return std::nullopt;
    w.lo = std::min(w.lo, tw->lo);
    w.hi = std::max(w.hi, tw->hi);
  }
  if (terms_.empty()) return TimeWindow{0.0, 0.0};
  return w;
}
double LinearCombination::sup_abs() const {
  double m = 0.0;
  for (const auto& [c, f] : terms_) m += std::abs(c) * f->sup_abs();
  return m;
}
double LinearCombination::spatial_l1_bound(int n) const {
  double m = 0.0;
  for (const auto& [c, f] : terms_) m += std::abs(c) * f->spatial_l1_bound(n);
  return m;
}
double LinearCombination::heat_difference(const Point& x, double t, double /*u0*/, double sigma,
                                          Side side, int n, int nodes) const {
  double v = 0.0;
  for (const auto& [c, f] : terms_)
    v += c * f->heat_difference(x, t, f->value(x, t), sigma, side, n, nodes);
  return v;
}
TailEstimate LinearCombination::history_tail(const Point& x, double t, double cut, double s,
                                             Side side, int n) const {
  TailEstimate out;
  for (const auto& [c, f] : terms_) {
    const TailEstimate e = f->history_tail(x, t, cut, s, side, n);
    out.value += c * e.value;
    out.bound += std::abs(c) * e.bound;
  }
  return out;
}
double LinearCombination::suggested_cut(const Point& x, double t, double s, Side side,
                                        int n) const {
  double cut = 0.0;
  for (const auto& term : terms_)
    cut = std::max(cut, term.second->suggested_cut(x, t, s, side, n));
  return cut;
}

// ---------------------------------------------------------------------------

double FunctionField::time_derivative(const Point& x, double t) const {
  return fd_time_derivative(*this, x, t, 1e-4);
}

double FunctionField::laplacian(const Point& x, double t, int n) const {
  return fd_laplacian(*this, x, t, n, 1e-4);
}

}  // namespace fracheat
