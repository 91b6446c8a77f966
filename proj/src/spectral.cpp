#include "fracheat/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "fracheat/core.hpp"

namespace fracheat {

namespace {

// FFTW's planner is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct SpectralPlan::Impl {
  std::vector<int> dims;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::size_t size = 0;
};

SpectralPlan::SpectralPlan(const SpaceTimeGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  grid_.validate();
  impl_->dims.push_back(grid_.Nt);
  for (int d = 0; d < grid_.n; ++d) impl_->dims.push_back(grid_.Nx);
  impl_->size = grid_.size();
  std::vector<std::complex<double>> scratch(impl_->size);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  const int rank = static_cast<int>(impl_->dims.size());
  impl_->fwd = fftw_plan_dft(rank, impl_->dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft(rank, impl_->dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->bwd) throw Error("FFTW planning failed");
}

SpectralPlan::~SpectralPlan() {
  std::lock_guard lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
}

double SpectralPlan::xi_of(int j) const {
  return 2.0 * std::numbers::pi * signed_index(j, grid_.Nx) / grid_.Lx;
}

double SpectralPlan::rho_of(int m) const {
  return 2.0 * std::numbers::pi * signed_index(m, grid_.Nt) / grid_.Lt;
}

std::vector<std::complex<double>> SpectralPlan::forward(
    const std::vector<std::complex<double>>& v) const {
  if (v.size() != impl_->size) throw InvalidArgument("transform input has the wrong size");
  std::vector<std::complex<double>> out(v);
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(impl_->fwd, buf, buf);
  return out;
}

std::vector<std::complex<double>> SpectralPlan::inverse(
    const std::vector<std::complex<double>>& v) const {
  if (v.size() != impl_->size) throw InvalidArgument("transform input has the wrong size");
  std::vector<std::complex<double>> out(v);
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(impl_->bwd, buf, buf);
  const double scale = 1.0 / static_cast<double>(impl_->size);
  for (auto& c : out) c *= scale;
  return out;
}

std::complex<double> SpectralPlan::multiplier(std::size_t idx, double s, Side side) const {
  SymbolPoint p;
  for (int d = grid_.n - 1; d >= 0; --d) {
    p.xi[d] = xi_of(static_cast<int>(idx % grid_.Nx));
    idx /= grid_.Nx;
  }
  const int m = static_cast<int>(idx);
  p.rho = rho_of(m);
  const auto sym = complex_power_symbol(p, FracOrder(s), side);
  // +rho and -rho alias at the time Nyquist bin; average the two branches.
  if (m == grid_.Nt / 2) return {sym.real(), 0.0};
  return sym;
}

SampledField apply_symbol(const SpectralPlan& plan, const SampledField& f, FracOrder s, Side side) {
  f.validate();
  const auto& g = plan.grid();
  if (g.n != f.grid.n || g.Nx != f.grid.Nx || g.Nt != f.grid.Nt || g.Lx != f.grid.Lx ||
      g.Lt != f.grid.Lt)
    throw InvalidArgument("spectral plan and field grids differ");
  auto hat = plan.forward(f.values);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= plan.multiplier(i, s.value(), side);
  return {f.grid, plan.inverse(hat)};
}

SampledField apply_symbol(const SampledField& f, FracOrder s, Side side) {
  const SpectralPlan plan(f.grid);
  return apply_symbol(plan, f, s, side);
}

SampledField solve_homogeneous_projection(const SampledField& f, FracOrder /*s*/) {
  f.validate();
  std::complex<double> mean = 0.0;
  for (const auto& v : f.values) mean += v;
  mean /= static_cast<double>(f.values.size());
  return SampledField::constant(f.grid, mean);
}

std::complex<double> trig_interpolate(const SpectralPlan& plan, const SampledField& f,
                                      const Point& x, double t) {
  const auto& g = plan.grid();
  const auto hat = plan.forward(f.values);
  const double inv = 1.0 / static_cast<double>(hat.size());
  // Per-axis phase tables; Nyquist bins use cos so real data interpolate to real values.
  auto axis_table = [](int N, double L, double coord) {
    std::vector<std::complex<double>> tab(N);
    const double u = coord + 0.5 * L;
    for (int j = 0; j < N; ++j) {
      const double w = 2.0 * std::numbers::pi * SpectralPlan::signed_index(j, N) / L;
      tab[j] = j == N / 2 ? std::complex<double>(std::cos(w * u), 0.0) : std::polar(1.0, w * u);
    }
    return tab;
  };
  const auto tt = axis_table(g.Nt, g.Lt, t);
  std::vector<std::vector<std::complex<double>>> xt;
  for (int d = 0; d < g.n; ++d) xt.push_back(axis_table(g.Nx, g.Lx, x[d]));
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    std::size_t rem = i;
    std::complex<double> ph = 1.0;
    for (int d = g.n - 1; d >= 0; --d) {
      ph *= xt[d][rem % g.Nx];
      rem /= g.Nx;
    }
    ph *= tt[rem];
    acc += hat[i] * ph;
  }
  return acc * inv;
}

void require_commensurate(const AnalyticField& field, const SpaceTimeGrid& grid) {
  if (field.kind() != FieldKind::coswave) return;
  auto on_lattice = [](double w, double L) {
    const double k = w * L / (2.0 * std::numbers::pi);
    return std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, std::abs(k));
  };
  for (int d = 0; d < grid.n; ++d)
    if (!on_lattice(field.xi()[d], grid.Lx))
      throw IncommensurateFrequency("coswave xi" + std::to_string(d + 1) +
                                    " is not a multiple of 2 pi / L_x");
  if (!on_lattice(field.rho(), grid.Lt))
    throw IncommensurateFrequency("coswave rho is not a multiple of 2 pi / L_t");
}

CrossValidation cross_validate(const AnalyticField& field, const SpaceTimeGrid& grid,
                               const OperatorParams& params,
                               const std::vector<SpaceTimePoint>& points) {
  grid.validate();
  if (grid.n != params.n) throw InvalidArgument("grid and operator dimensions differ");
  require_commensurate(field, grid);
  const SpectralPlan plan(grid);
  const SampledField out = apply_symbol(plan, SampledField::sample(field, grid), params.s, Side::left);
  CrossValidation cv;
  double diff = 0.0, scale = 0.0;
  for (const auto& p : points) {
    const double a = trig_interpolate(plan, out, p.x, p.t).real();
    const double b = apply_left(field, p.x, p.t, params).value;
    cv.spectral.push_back(a);
    cv.quadrature.push_back(b);
    diff = std::max(diff, std::abs(a - b));
    scale = std::max(scale, std::abs(b));
  }
  cv.max_discrepancy = scale > 0.0 ? diff / scale : diff;
  return cv;
}

}  // namespace fracheat
