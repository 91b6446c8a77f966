#include "fracheat/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fracheat {

std::size_t SpaceTimeGrid::space_size() const {
  std::size_t m = 1;
  for (int d = 0; d < n; ++d) m *= static_cast<std::size_t>(Nx);
  return m;
}

void SpaceTimeGrid::validate() const {
  checked_dimension(n);
  if (Nx < 4 || Nt < 4 || Nx % 2 != 0 || Nt % 2 != 0)
    throw InvalidArgument("grid point counts must be even and at least 4");
  if (!(Lx > 0.0 && Lt > 0.0 && std::isfinite(Lx) && std::isfinite(Lt)))
    throw InvalidArgument("grid extents must be positive and finite");
}

void SpaceTimeGrid::coordinates(std::size_t idx, Point& x, double& t) const {
  x = {0.0, 0.0, 0.0};
  for (int d = n - 1; d >= 0; --d) {
    x[d] = x_at(static_cast<int>(idx % Nx));
    idx /= Nx;
  }
  t = t_at(static_cast<int>(idx));
}

void SampledField::validate() const {
  grid.validate();
  if (values.size() != grid.size())
    throw InvalidArgument("sampled field has " + std::to_string(values.size()) +
                          " values, grid needs " + std::to_string(grid.size()));
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("sampled field contains a non-finite value");
}

SampledField SampledField::sample(const Field& field, const SpaceTimeGrid& grid) {
  grid.validate();
  SampledField out{grid, std::vector<std::complex<double>>(grid.size())};
  Point x;
  double t;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    grid.coordinates(i, x, t);
    out.values[i] = field.value(x, t);
  }
  return out;
}

SampledField SampledField::constant(const SpaceTimeGrid& grid, std::complex<double> c) {
  grid.validate();
  return {grid, std::vector<std::complex<double>>(grid.size(), c)};
}

double SampledField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double SampledField::max_imag() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[8];
  static_assert(sizeof(T) == 8);
  std::memcpy(buf, &v, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + 8);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8))
    throw ParseError("truncated sampled-field stream", "<eof>");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + 8);
  T v;
  std::memcpy(&v, buf, 8);
  return v;
}

}  // namespace

void write_binary(std::ostream& os, const SampledField& f) {
  f.validate();
  put_le<std::int64_t>(os, f.grid.n);
  put_le<std::int64_t>(os, f.grid.Nx);
  put_le<std::int64_t>(os, f.grid.Nt);
  put_le<double>(os, f.grid.Lx);
  put_le<double>(os, f.grid.Lt);
  for (const auto& v : f.values) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
}

SampledField read_binary(std::istream& is) {
  SampledField f;
  const auto n = get_le<std::int64_t>(is);
  const auto nx = get_le<std::int64_t>(is);
  const auto nt = get_le<std::int64_t>(is);
  if (n < 1 || n > 3 || nx < 4 || nt < 4 || nx > (1 << 20) || nt > (1 << 20))
    throw ParseError("invalid sampled-field header", "header");
  f.grid.n = static_cast<int>(n);
  f.grid.Nx = static_cast<int>(nx);
  f.grid.Nt = static_cast<int>(nt);
  f.grid.Lx = get_le<double>(is);
  f.grid.Lt = get_le<double>(is);
  f.grid.validate();
  f.values.resize(f.grid.size());
  for (auto& v : f.values) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = {re, im};
  }
  f.validate();
  return f;
}

void write_binary_file(const std::string& path, const SampledField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot open '" + path + "' for writing");
  write_binary(os, f);
}

SampledField read_binary_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open '" + path + "'");
  return read_binary(is);
}

}  // namespace fracheat
