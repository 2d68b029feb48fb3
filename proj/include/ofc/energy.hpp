#pragma once

#include <string>

#include "ofc/density.hpp"
#include "ofc/field.hpp"

namespace ofc {

enum class MeasureKind { f_measure, accuracy };

const char* to_string(MeasureKind kind);
MeasureKind parse_measure_kind(const std::string& s);

/// The performance measure being optimised, as an energy to minimise.
///
/// f-measure: E[u] = (k∫H(-u)f₊ + ∫H(u)f₋) / ∫H(u)f₊ with k = β²P/N.
/// accuracy:  E[u] = P∫H(-u)f₊ + N∫H(u)f₋, the smoothed error count.
struct MeasureEnergy {
  MeasureKind kind = MeasureKind::f_measure;
  double beta = 1;
  double k = 0;

  static MeasureEnergy f_measure(double beta, const DensityPair& d);
  static MeasureEnergy accuracy();
};

double evaluate(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h);

/// L² functional derivative E'[u], node by node.
ScalarField gradient(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h);

struct EnergyEvaluation {
  double energy;
  ScalarField gradient;
};

/// evaluate and gradient sharing one pass over the grid.
EnergyEvaluation evaluate_with_gradient(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d,
                                        double eps_h);

/// The descent field written with unnormalised integrals and β² in place
/// of k: G = δ(u)(f₋ - β²f₊)∫f₊H(u) - δ(u)f₊∫[f₋H(u) + β²f₊H(-u)].
/// Same zero set as E'[u] when k = β². The accuracy kind returns E'[u].
ScalarField literal_descent(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h);

/// max |E'[u]| over the band where δ(u) exceeds 1e-3 of its maximum.
double stationarity_residual(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h);

}  // namespace ofc
