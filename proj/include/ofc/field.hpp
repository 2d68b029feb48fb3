#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ofc/error.hpp"

namespace ofc {

using Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Axis-aligned box sampled by a regular lattice of nodes.
///
/// Axis `a` has `cells(a)` cells and `cells(a) + 1` nodes; node values are
/// stored row-major (the last axis varies fastest).
template <typename Scalar_>
class Grid {
 public:
  using Scalar = Scalar_;
  using Point = VectorX<Scalar>;

  Grid() = default;

  Grid(Point lower, Point upper, std::vector<Index> cells)
      : lower_(std::move(lower)), upper_(std::move(upper)), cells_(std::move(cells)) {
    const auto d = static_cast<Index>(cells_.size());
    if (d < 1 || lower_.size() != d || upper_.size() != d)
      throw Error(ErrorCode::invalid_argument, "grid: bounds and resolution must share a positive dimension");
    spacing_.resize(d);
    strides_.assign(cells_.size(), 1);
    for (Index a = d - 1; a >= 0; --a) {
      if (cells_[a] < 1)
        throw Error(ErrorCode::invalid_argument, "grid: axis " + std::to_string(a) + " needs at least one cell");
      if (!(lower_[a] < upper_[a]))
        throw Error(ErrorCode::invalid_argument, "grid: axis " + std::to_string(a) + " requires min < max");
      spacing_[a] = (upper_[a] - lower_[a]) / static_cast<Scalar>(cells_[a]);
      if (!std::isfinite(spacing_[a]) || !(spacing_[a] > 0))
        throw Error(ErrorCode::invalid_argument, "grid: non-finite spacing on axis " + std::to_string(a));
      if (a + 1 < d) strides_[a] = strides_[a + 1] * (cells_[a + 1] + 1);
    }
    size_ = strides_[0] * (cells_[0] + 1);
  }

  /// Same cell count on every axis.
  static Grid uniform(Point lower, Point upper, Index cells) {
    std::vector<Index> c(static_cast<std::size_t>(lower.size()), cells);
    return Grid(std::move(lower), std::move(upper), std::move(c));
  }

  int dim() const { return static_cast<int>(cells_.size()); }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  Index cells(int axis) const { return cells_[axis]; }
  Index nodes(int axis) const { return cells_[axis] + 1; }
  const std::vector<Index>& cells() const { return cells_; }
  Scalar spacing(int axis) const { return spacing_[axis]; }
  Scalar max_spacing() const { return spacing_.maxCoeff(); }
  Scalar min_spacing() const { return spacing_.minCoeff(); }
  Index stride(int axis) const { return strides_[axis]; }
  Index size() const { return size_; }

  Index index_along(Index flat, int axis) const {
    return (flat / strides_[axis]) % (cells_[axis] + 1);
  }

  Scalar coordinate(int axis, Index i) const {
    return i == cells_[axis] ? upper_[axis]
                             : lower_[axis] + static_cast<Scalar>(i) * spacing_[axis];
  }

  Point node(Index flat) const {
    Point x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = coordinate(a, index_along(flat, a));
    return x;
  }

  bool on_boundary(Index flat) const {
    for (int a = 0; a < dim(); ++a) {
      const Index i = index_along(flat, a);
      if (i == 0 || i == cells_[a]) return true;
    }
    return false;
  }

  bool contains(const Point& x) const {
    for (int a = 0; a < dim(); ++a)
      if (!(x[a] >= lower_[a] && x[a] <= upper_[a])) return false;
    return true;
  }

  friend bool operator==(const Grid& l, const Grid& r) {
    return l.cells_ == r.cells_ && l.lower_ == r.lower_ && l.upper_ == r.upper_;
  }
  friend bool operator!=(const Grid& l, const Grid& r) { return !(l == r); }

 private:
  Point lower_, upper_, spacing_;
  std::vector<Index> cells_, strides_;
  Index size_ = 0;
};

/// Node-centred samples of a scalar function on a Grid.
template <typename Scalar_>
class Field {
 public:
  using Scalar = Scalar_;
  using GridType = Grid<Scalar>;
  using Vector = VectorX<Scalar>;

  Field() = default;
  explicit Field(GridType grid) : grid_(std::move(grid)), values_(Vector::Zero(grid_.size())) {}
  Field(GridType grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw Error(ErrorCode::invalid_argument, "field: value count does not match grid node count");
  }

  template <typename Fn>
  static Field sample(const GridType& grid, Fn&& fn) {
    Vector v(grid.size());
    for (Index i = 0; i < grid.size(); ++i) v[i] = fn(grid.node(i));
    return Field(grid, std::move(v));
  }

  static Field constant(const GridType& grid, Scalar c) {
    return Field(grid, Vector::Constant(grid.size(), c));
  }

  const GridType& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  Scalar operator[](Index i) const { return values_[i]; }
  Scalar& operator[](Index i) { return values_[i]; }
  Index size() const { return values_.size(); }
  bool all_finite() const { return values_.allFinite(); }

 private:
  GridType grid_;
  Vector values_;
};

using GridSpec = Grid<double>;
using ScalarField = Field<double>;

template <typename Scalar>
void require_same_grid(const Grid<Scalar>& a, const Grid<Scalar>& b, const char* where) {
  if (a != b) throw Error(ErrorCode::grid_mismatch, std::string(where) + ": fields live on different grids");
}

/// Trapezoidal quadrature weights: Π_a h_a, halved once per boundary axis.
template <typename Scalar>
VectorX<Scalar> trapezoid_weights(const Grid<Scalar>& grid) {
  VectorX<Scalar> w(grid.size());
  Scalar cell_volume = 1;
  for (int a = 0; a < grid.dim(); ++a) cell_volume *= grid.spacing(a);
  for (Index i = 0; i < grid.size(); ++i) {
    Scalar wi = cell_volume;
    for (int a = 0; a < grid.dim(); ++a) {
      const Index k = grid.index_along(i, a);
      if (k == 0 || k == grid.cells(a)) wi *= Scalar(0.5);
    }
    w[i] = wi;
  }
  return w;
}

template <typename Scalar>
Scalar integrate(const Field<Scalar>& f) {
  return trapezoid_weights(f.grid()).dot(f.values());
}

enum class OutOfBounds { clamp, error };

template <typename Scalar>
struct Interpolated {
  Scalar value;
  bool clamped;
};

/// Multilinear interpolation. Points outside the box are projected onto it
/// (and flagged) unless `policy` is OutOfBounds::error.
template <typename Scalar, typename Derived>
Interpolated<Scalar> interpolate(const Field<Scalar>& f, const Eigen::MatrixBase<Derived>& x,
                                 OutOfBounds policy = OutOfBounds::clamp) {
  const auto& g = f.grid();
  const int d = g.dim();
  if (x.size() != d) throw Error(ErrorCode::invalid_argument, "interpolate: point dimension mismatch");

  bool clamped = false;
  Index base = 0;
  // Per-axis cell index and local coordinate in [0, 1].
  std::vector<Index> stride_of(d);
  std::vector<Scalar> t(d);
  for (int a = 0; a < d; ++a) {
    Scalar xa = x[a];
    if (!std::isfinite(xa)) throw Error(ErrorCode::invalid_argument, "interpolate: non-finite coordinate");
    if (xa < g.lower()[a] || xa > g.upper()[a]) {
      if (policy == OutOfBounds::error)
        throw Error(ErrorCode::out_of_domain, "interpolate: point outside grid bounds on axis " + std::to_string(a));
      xa = std::clamp(xa, g.lower()[a], g.upper()[a]);
      clamped = true;
    }
    const Scalar s = (xa - g.lower()[a]) / g.spacing(a);
    Index c = static_cast<Index>(std::floor(s));
    c = std::clamp<Index>(c, 0, g.cells(a) - 1);
    t[a] = std::clamp<Scalar>(s - static_cast<Scalar>(c), 0, 1);
    base += c * g.stride(a);
    stride_of[a] = g.stride(a);
  }

  Scalar acc = 0;
  const Index corners = Index(1) << d;
  for (Index m = 0; m < corners; ++m) {
    Scalar w = 1;
    Index idx = base;
    for (int a = 0; a < d; ++a) {
      if (m & (Index(1) << a)) {
        w *= t[a];
        idx += stride_of[a];
      } else {
        w *= 1 - t[a];
      }
    }
    if (w != 0) acc += w * f[idx];
  }
  return {acc, clamped};
}

namespace detail {

template <typename Scalar>
void require_stencil_nodes(const Grid<Scalar>& g, const char* where) {
  for (int a = 0; a < g.dim(); ++a)
    if (g.nodes(a) < 3)
      throw Error(ErrorCode::invalid_argument, std::string(where) + ": needs at least 3 nodes per axis");
}

}  // namespace detail

/// Central second differences summed over axes. Boundary nodes use a
/// linearly extrapolated ghost value, so the boundary second difference is
/// zero and affine fields are annihilated everywhere.
template <typename Scalar>
Field<Scalar> laplacian(const Field<Scalar>& f) {
  const auto& g = f.grid();
  detail::require_stencil_nodes(g, "laplacian");
  Field<Scalar> out(g);
  for (int a = 0; a < g.dim(); ++a) {
    const Index s = g.stride(a);
    const Scalar inv_h2 = 1 / (g.spacing(a) * g.spacing(a));
    for (Index i = 0; i < g.size(); ++i) {
      const Index k = g.index_along(i, a);
      if (k == 0 || k == g.cells(a)) continue;
      out[i] += (f[i + s] - 2 * f[i] + f[i - s]) * inv_h2;
    }
  }
  return out;
}

/// |∇f| with central differences inside and one-sided differences on the
/// boundary.
template <typename Scalar>
Field<Scalar> gradient_magnitude(const Field<Scalar>& f) {
  const auto& g = f.grid();
  detail::require_stencil_nodes(g, "gradient_magnitude");
  VectorX<Scalar> sq = VectorX<Scalar>::Zero(g.size());
  for (int a = 0; a < g.dim(); ++a) {
    const Index s = g.stride(a);
    const Scalar h = g.spacing(a);
    for (Index i = 0; i < g.size(); ++i) {
      const Index k = g.index_along(i, a);
      Scalar dv;
      if (k == 0)
        dv = (f[i + s] - f[i]) / h;
      else if (k == g.cells(a))
        dv = (f[i] - f[i - s]) / h;
      else
        dv = (f[i + s] - f[i - s]) / (2 * h);
      sq[i] += dv * dv;
    }
  }
  return Field<Scalar>(g, sq.cwiseSqrt());
}

/// Grid over the bounding box of `points` (one sample per row), padded by
/// `pad_fraction` of the extent on each side.
template <typename Derived>
Grid<typename Derived::Scalar> bounding_grid(const Eigen::MatrixBase<Derived>& points,
                                            const std::vector<Index>& cells,
                                            typename Derived::Scalar pad_fraction = 0.1) {
  using Scalar = typename Derived::Scalar;
  if (points.rows() == 0) throw Error(ErrorCode::invalid_argument, "bounding_grid: no points");
  VectorX<Scalar> lo = points.colwise().minCoeff().transpose();
  VectorX<Scalar> hi = points.colwise().maxCoeff().transpose();
  for (Index a = 0; a < lo.size(); ++a) {
    Scalar ext = hi[a] - lo[a];
    if (!(ext > 0)) ext = std::max<Scalar>(std::abs(lo[a]), 1);
    lo[a] -= pad_fraction * ext;
    hi[a] += pad_fraction * ext;
  }
  return Grid<Scalar>(lo, hi, cells);
}

}  // namespace ofc
