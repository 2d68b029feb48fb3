#pragma once

#include <cmath>
#include <variant>

#include "ofc/field.hpp"

namespace ofc {

// Signed-distance initialisations. Sign convention: u > 0 inside the shape.

template <typename Scalar>
struct Sphere {
  VectorX<Scalar> center;
  Scalar radius;
};

template <typename Scalar>
struct Box {
  VectorX<Scalar> lower;
  VectorX<Scalar> upper;
};

/// Union of equal spheres on a regular lattice spanning the grid.
///
/// Each axis is split into `cells_per_axis` periods; sphere centres sit at
/// `lower + (j + offset) * period` and the radius is `radius_fraction` times
/// the smallest period. A radius below half a period keeps the spheres
/// disjoint, which makes the max-of-spheres formula an exact distance.
template <typename Scalar>
struct Lattice {
  int cells_per_axis = 6;
  Scalar radius_fraction = Scalar(0.3);
  Scalar offset = Scalar(0.5);
};

template <typename Scalar>
using InitShape = std::variant<Lattice<Scalar>, Sphere<Scalar>, Box<Scalar>>;

namespace detail {

template <typename Scalar>
Field<Scalar> shape_field(const Grid<Scalar>& grid, const Sphere<Scalar>& s) {
  if (!(s.radius > 0)) throw Error(ErrorCode::invalid_shape, "sphere radius must be positive");
  if (s.center.size() != grid.dim()) throw Error(ErrorCode::invalid_shape, "sphere centre dimension mismatch");
  return Field<Scalar>::sample(grid, [&](const VectorX<Scalar>& x) { return s.radius - (x - s.center).norm(); });
}

template <typename Scalar>
Field<Scalar> shape_field(const Grid<Scalar>& grid, const Box<Scalar>& b) {
  if (b.lower.size() != grid.dim() || b.upper.size() != grid.dim())
    throw Error(ErrorCode::invalid_shape, "box dimension mismatch");
  if (!((b.upper - b.lower).array() > 0).all()) throw Error(ErrorCode::invalid_shape, "degenerate box");
  return Field<Scalar>::sample(grid, [&](const VectorX<Scalar>& x) {
    const VectorX<Scalar> below = b.lower - x;
    const VectorX<Scalar> above = x - b.upper;
    const VectorX<Scalar> outside = below.cwiseMax(above).cwiseMax(Scalar(0));
    const Scalar outer = outside.norm();
    if (outer > 0) return -outer;
    return (-below).cwiseMin(-above).minCoeff();
  });
}

template <typename Scalar>
Field<Scalar> shape_field(const Grid<Scalar>& grid, const Lattice<Scalar>& l) {
  if (l.cells_per_axis < 1 || !(l.radius_fraction > 0) || !(l.radius_fraction < Scalar(0.5)))
    throw Error(ErrorCode::invalid_shape, "lattice needs >= 1 cell per axis and radius fraction in (0, 0.5)");
  const int d = grid.dim();
  VectorX<Scalar> period(d);
  for (int a = 0; a < d; ++a) period[a] = (grid.upper()[a] - grid.lower()[a]) / l.cells_per_axis;
  const Scalar radius = l.radius_fraction * period.minCoeff();
  const Scalar offset = l.offset - std::floor(l.offset);
  return Field<Scalar>::sample(grid, [&](const VectorX<Scalar>& x) {
    // Nearest lattice centre, found axis by axis.
    Scalar sq = 0;
    for (int a = 0; a < d; ++a) {
      const Scalar s = (x[a] - grid.lower()[a]) / period[a] - offset;
      Scalar j = std::round(s);
      j = std::clamp<Scalar>(j, 0, static_cast<Scalar>(l.cells_per_axis - 1));
      const Scalar c = grid.lower()[a] + (j + offset) * period[a];
      sq += (x[a] - c) * (x[a] - c);
    }
    return radius - std::sqrt(sq);
  });
}

}  // namespace detail

template <typename Scalar>
Field<Scalar> init_shape(const Grid<Scalar>& grid, const InitShape<Scalar>& shape) {
  return std::visit([&](const auto& s) { return detail::shape_field(grid, s); }, shape);
}

}  // namespace ofc
