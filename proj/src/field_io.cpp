#include "ofc/field_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ofc/format.hpp"

namespace ofc {

std::string grid_header(const GridSpec& grid) {
  std::string s = "dim " + std::to_string(grid.dim()) + ";";
  for (int a = 0; a < grid.dim(); ++a) {
    s += " axis " + std::to_string(a) + ": " + to_text(grid.lower()[a]) + " " + to_text(grid.upper()[a]) + " " +
         std::to_string(grid.cells(a)) + ";";
  }
  return s;
}

GridSpec parse_grid_header(const std::string& line) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::parse_error, "grid header: " + why + " in '" + line + "'");
  };
  auto parts = split(line, ';');
  if (parts.size() < 2) throw fail("missing fields");
  auto head = trim(parts[0]);
  if (head.substr(0, 4) != "dim ") throw fail("expected 'dim k'");
  auto d = parse_integer(head.substr(4));
  if (!d || *d < 1) throw fail("bad dimension");
  VectorX<double> lo(*d), hi(*d);
  std::vector<Index> cells(static_cast<std::size_t>(*d));
  for (long long a = 0; a < *d; ++a) {
    if (static_cast<std::size_t>(a + 1) >= parts.size()) throw fail("missing axis");
    auto item = trim(parts[static_cast<std::size_t>(a + 1)]);
    const std::string prefix = "axis " + std::to_string(a) + ":";
    if (item.substr(0, prefix.size()) != prefix) throw fail("expected '" + prefix + "'");
    std::istringstream ss{std::string(item.substr(prefix.size()))};
    std::string smin, smax, scells;
    ss >> smin >> smax >> scells;
    auto vmin = parse_double(smin), vmax = parse_double(smax);
    auto vc = parse_integer(scells);
    if (!vmin || !vmax || !vc) throw fail("bad axis values");
    lo[a] = *vmin;
    hi[a] = *vmax;
    cells[static_cast<std::size_t>(a)] = *vc;
  }
  for (std::size_t i = static_cast<std::size_t>(*d) + 1; i < parts.size(); ++i)
    if (!trim(parts[i]).empty()) throw fail("trailing content");
  try {
    return GridSpec(lo, hi, cells);
  } catch (const Error& e) {
    throw fail(e.what());
  }
}

void write_field(std::ostream& os, const ScalarField& f) {
  os << grid_header(f.grid()) << '\n';
  for (Index i = 0; i < f.size(); ++i) os << to_text(f[i]) << '\n';
}

ScalarField read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::parse_error, "field: missing grid header");
  GridSpec grid = parse_grid_header(line);
  VectorX<double> v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    if (!std::getline(is, line))
      throw Error(ErrorCode::parse_error, "field: truncated after " + std::to_string(i) + " of " +
                                              std::to_string(grid.size()) + " values");
    auto x = parse_double(line);
    if (!x || !std::isfinite(*x))
      throw Error(ErrorCode::parse_error, "field: bad value on line " + std::to_string(i + 2));
    v[i] = *x;
  }
  return ScalarField(grid, std::move(v));
}

void save_field(const std::string& path, const ScalarField& f) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io_failure, "cannot write " + path);
  write_field(os, f);
  if (!os) throw Error(ErrorCode::io_failure, "write failed: " + path);
}

ScalarField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_failure, "cannot read " + path);
  return read_field(is);
}

void write_pgm(std::ostream& os, const ScalarField& f) {
  const auto& g = f.grid();
  if (g.dim() != 2) throw Error(ErrorCode::dimension_error, "heatmap export needs a 2-D field");
  const double lo = f.values().minCoeff(), hi = f.values().maxCoeff();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  const Index w = g.nodes(0), h = g.nodes(1);
  os << "P5\n" << w << ' ' << h << "\n255\n";
  std::string row(static_cast<std::size_t>(w), '\0');
  for (Index r = 0; r < h; ++r) {
    const Index j = h - 1 - r;
    for (Index i = 0; i < w; ++i) {
      const double v = (f[i * g.stride(0) + j * g.stride(1)] - lo) * scale;
      row[static_cast<std::size_t>(i)] = static_cast<char>(static_cast<unsigned char>(std::lround(v)));
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void save_pgm(const std::string& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io_failure, "cannot write " + path);
  write_pgm(os, f);
  if (!os) throw Error(ErrorCode::io_failure, "write failed: " + path);
}

}  // namespace ofc
