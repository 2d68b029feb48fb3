#pragma once

#include <iosfwd>
#include <string>

#include "ofc/field.hpp"

namespace ofc {

// Text format: one header line `dim k; axis i: min max cells; ...` followed by
// one node value per line in row-major order. Numbers are written in their
// shortest round-trip form, so write/read is bit-exact.

std::string grid_header(const GridSpec& grid);
GridSpec parse_grid_header(const std::string& line);

void write_field(std::ostream& os, const ScalarField& f);
ScalarField read_field(std::istream& is);

void save_field(const std::string& path, const ScalarField& f);
ScalarField load_field(const std::string& path);

/// Binary 8-bit portable graymap of a 2-D field. Columns follow axis 0,
/// rows follow axis 1 with the top row at the upper bound; values map
/// affinely from [min, max] onto [0, 255].
void write_pgm(std::ostream& os, const ScalarField& f);
void save_pgm(const std::string& path, const ScalarField& f);

}  // namespace ofc
