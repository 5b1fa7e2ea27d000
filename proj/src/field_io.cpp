#include "whitham/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "whitham/errors.hpp"

namespace whitham {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("binary field: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field_text(const Field& f, std::ostream& out) {
  const auto& g = f.grid();
  for (std::size_t j = 0; j < f.size(); ++j) {
    out << fmt17(g.point(j)) << ' ' << fmt17(f[j]) << '\n';
  }
}

void write_field_text(const Field& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_field_text(f, out);
}

Field read_field_text(std::istream& in) {
  std::vector<double> x, v;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a)) continue;
    if (!(row >> b)) throw ConfigError("field text: expected two columns");
    x.push_back(a);
    v.push_back(b);
  }
  if (x.size() < 8) throw ConfigError("field text: too few samples");
  const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (std::abs((x[j] - x[j - 1]) - dx) > 1e-9 * std::max(1.0, std::abs(dx))) {
      throw ConfigError("field text: abscissae are not uniformly spaced");
    }
  }
  const PeriodicGrid grid(dx * static_cast<double>(x.size()), x.size());
  return Field::from_values(grid, std::move(v));
}

Field read_field_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return read_field_text(in);
}

void write_field_binary(const Field& f, std::ostream& out) {
  put_f64(out, f.grid().length());
  put_u64(out, f.size());
  for (double v : f.values()) put_f64(out, v);
}

void write_field_binary(const Field& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_field_binary(f, out);
}

Field read_field_binary(std::istream& in) {
  const double length = get_f64(in);
  const std::uint64_t n = get_u64(in);
  if (n > (std::uint64_t{1} << 32)) throw ConfigError("binary field: implausible size");
  const PeriodicGrid grid(length, static_cast<std::size_t>(n));
  std::vector<double> v(grid.size());
  for (auto& x : v) x = get_f64(in);
  return Field::from_values(grid, std::move(v));
}

Field read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return read_field_binary(in);
}

Field read_field(const std::filesystem::path& path) {
  if (path.extension() == ".bin") return read_field_binary(path);
  return read_field_text(path);
}

}  // namespace whitham
