#include "ofc/energy.hpp"

#include "ofc/smoothing.hpp"

namespace ofc {

const char* to_string(MeasureKind kind) {
  return kind == MeasureKind::f_measure ? "f-measure" : "accuracy";
}

MeasureKind parse_measure_kind(const std::string& s) {
  if (s == "f-measure" || s == "f_measure" || s == "f") return MeasureKind::f_measure;
  if (s == "accuracy") return MeasureKind::accuracy;
  throw Error(ErrorCode::invalid_argument, "unknown measure '" + s + "'");
}

MeasureEnergy MeasureEnergy::f_measure(double beta, const DensityPair& d) {
  if (!(beta > 0)) throw Error(ErrorCode::invalid_argument, "beta must be positive");
  if (d.n_count <= 0) throw Error(ErrorCode::invalid_argument, "density pair has no negatives");
  return {MeasureKind::f_measure, beta, beta * beta * static_cast<double>(d.p_count) / static_cast<double>(d.n_count)};
}

MeasureEnergy MeasureEnergy::accuracy() { return {MeasureKind::accuracy, 1.0, 0.0}; }

namespace {

struct Integrals {
  Eigen::VectorXd h_in;   // H(u)
  Eigen::VectorXd delta;  // δ(u)
  double pos_in;          // ∫H(u)f₊
  double pos_out;         // ∫H(-u)f₊
  double neg_in;          // ∫H(u)f₋
};

Integrals integrals(const ScalarField& u, const DensityPair& d, double eps_h) {
  require_same_grid(u.grid(), d.f_pos.grid(), "energy");
  require_same_grid(u.grid(), d.f_neg.grid(), "energy");
  if (!(eps_h > 0)) throw Error(ErrorCode::invalid_argument, "Heaviside width must be positive");
  const Eigen::VectorXd w = trapezoid_weights(u.grid());
  auto step = smoothed_step(u.values(), eps_h);
  Integrals s;
  s.h_in = std::move(step.inside);
  s.delta = std::move(step.delta);
  const Eigen::VectorXd wf = w.cwiseProduct(d.f_pos.values());
  s.pos_in = wf.dot(s.h_in);
  s.pos_out = wf.dot(step.outside);
  s.neg_in = w.cwiseProduct(d.f_neg.values()).dot(s.h_in);
  return s;
}

void require_positive_mass(double pos_in) {
  if (!(pos_in > 1e-12))
    throw Error(ErrorCode::vanishing_positive_mass, "the positive region holds no positive-class mass");
}

double energy_from(const MeasureEnergy& e, const Integrals& s, const DensityPair& d) {
  if (e.kind == MeasureKind::accuracy)
    return static_cast<double>(d.p_count) * s.pos_out + static_cast<double>(d.n_count) * s.neg_in;
  require_positive_mass(s.pos_in);
  return (e.k * s.pos_out + s.neg_in) / s.pos_in;
}

}  // namespace

double evaluate(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h) {
  return energy_from(e, integrals(u, d, eps_h), d);
}

EnergyEvaluation evaluate_with_gradient(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d,
                                        double eps_h) {
  const Integrals s = integrals(u, d, eps_h);
  const double energy = energy_from(e, s, d);
  const auto& fp = d.f_pos.values();
  const auto& fn = d.f_neg.values();
  Eigen::VectorXd g;
  if (e.kind == MeasureKind::accuracy) {
    g = s.delta.cwiseProduct(static_cast<double>(d.n_count) * fn - static_cast<double>(d.p_count) * fp);
  } else {
    g = s.delta.cwiseProduct(fn - (e.k + energy) * fp) / s.pos_in;
  }
  return {energy, ScalarField(u.grid(), std::move(g))};
}

ScalarField gradient(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h) {
  return evaluate_with_gradient(e, u, d, eps_h).gradient;
}

ScalarField literal_descent(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h) {
  if (e.kind == MeasureKind::accuracy) return gradient(e, u, d, eps_h);
  const Integrals s = integrals(u, d, eps_h);
  require_positive_mass(s.pos_in);
  const double b2 = e.beta * e.beta;
  const auto& fp = d.f_pos.values();
  const auto& fn = d.f_neg.values();
  Eigen::VectorXd g = s.delta.cwiseProduct((fn - b2 * fp) * s.pos_in - fp * (s.neg_in + b2 * s.pos_out));
  return ScalarField(u.grid(), std::move(g));
}

double stationarity_residual(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d, double eps_h) {
  const EnergyEvaluation ev = evaluate_with_gradient(e, u, d, eps_h);
  const Eigen::VectorXd delta = dirac(u.values(), eps_h);
  const double cutoff = 1e-3 * delta.maxCoeff();
  double r = 0;
  for (Index i = 0; i < delta.size(); ++i)
    if (delta[i] > cutoff) r = std::max(r, std::abs(ev.gradient[i]));
  return r;
}

}  // namespace ofc
