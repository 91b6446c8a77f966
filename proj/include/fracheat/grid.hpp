#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracheat/field.hpp"

namespace fracheat {

/// Uniform periodic space-time grid. Axis samples are -L/2 + j h, j = 0..N-1.
/// Flat storage is row-major over (t, x1, .., xn): time slowest, x_n fastest.
struct SpaceTimeGrid {
  int n = 1;
  double Lx = 2.0 * 3.141592653589793;
  double Lt = 2.0 * 3.141592653589793;
  int Nx = 32;
  int Nt = 32;

  double hx() const { return Lx / Nx; }
  double ht() const { return Lt / Nt; }
  double x_at(int j) const { return -0.5 * Lx + j * hx(); }
  double t_at(int m) const { return -0.5 * Lt + m * ht(); }
  std::size_t space_size() const;
  std::size_t size() const { return space_size() * static_cast<std::size_t>(Nt); }

  /// Throws InvalidArgument unless N_x, N_t >= 4 are even and extents are positive.
  void validate() const;

  /// Point and time of flat index `idx`.
  void coordinates(std::size_t idx, Point& x, double& t) const;
};

struct SampledField {
  SpaceTimeGrid grid;
  std::vector<std::complex<double>> values;

  /// Checks the value count against the grid and that every entry is finite.
  void validate() const;

  static SampledField sample(const Field& field, const SpaceTimeGrid& grid);
  static SampledField constant(const SpaceTimeGrid& grid, std::complex<double> c);

  double max_abs() const;
  double max_imag() const;
};

/// Binary layout: n, N_x, N_t as little-endian int64, L_x, L_t as little-endian
/// float64, then interleaved (re, im) float64 values in flat storage order.
void write_binary(std::ostream& os, const SampledField& f);
SampledField read_binary(std::istream& is);
void write_binary_file(const std::string& path, const SampledField& f);
SampledField read_binary_file(const std::string& path);

}  // namespace fracheat
