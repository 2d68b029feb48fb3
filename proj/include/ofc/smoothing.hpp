#pragma once

#include <cmath>

#include "ofc/field.hpp"

namespace ofc {

// Logistic smoothing of the unit step: H(y) = 1 / (1 + exp(-y/width)),
// δ(y) = H(y) H(-y) / width. H(y) + H(-y) = 1 holds pointwise and δ decays
// exponentially away from the front. Everything is written in terms of
// exp(-|y|/width) so neither tail loses precision.

template <typename Scalar>
Scalar heaviside(Scalar y, Scalar width) {
  const Scalar e = std::exp(-std::abs(y) / width);
  return y >= 0 ? 1 / (1 + e) : e / (1 + e);
}

template <typename Scalar>
Scalar dirac(Scalar y, Scalar width) {
  const Scalar e = std::exp(-std::abs(y) / width);
  return e / ((1 + e) * (1 + e) * width);
}

template <typename Scalar>
VectorX<Scalar> heaviside(const VectorX<Scalar>& y, Scalar width) {
  VectorX<Scalar> out(y.size());
  for (Index i = 0; i < y.size(); ++i) out[i] = heaviside(y[i], width);
  return out;
}

template <typename Scalar>
VectorX<Scalar> dirac(const VectorX<Scalar>& y, Scalar width) {
  const auto e = (-y.array().abs() / width).exp();
  return (e / ((1 + e).square() * width)).matrix();
}

/// H(u), H(-u) and δ(u) from a single exponential per node.
template <typename Scalar>
struct SmoothedStep {
  VectorX<Scalar> inside;
  VectorX<Scalar> outside;
  VectorX<Scalar> delta;
};

template <typename Scalar>
SmoothedStep<Scalar> smoothed_step(const VectorX<Scalar>& u, Scalar width) {
  const Index n = u.size();
  const VectorX<Scalar> e = (-u.array().abs() / width).exp().matrix();
  SmoothedStep<Scalar> s{VectorX<Scalar>(n), VectorX<Scalar>(n), VectorX<Scalar>(n)};
  for (Index i = 0; i < n; ++i) {
    const Scalar inv = 1 / (1 + e[i]);
    const Scalar big = inv, small = e[i] * inv;
    s.inside[i] = u[i] >= 0 ? big : small;
    s.outside[i] = u[i] >= 0 ? small : big;
    s.delta[i] = big * small / width;
  }
  return s;
}

}  // namespace ofc
