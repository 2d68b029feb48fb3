#pragma once

// Reference computations written independently of the library.

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <vector>

#include "ofc/data.hpp"
#include "ofc/density.hpp"

namespace oracle {

inline double normal_cdf(double x, double mean = 0, double sd = 1) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

inline double normal_pdf(double x, double mean = 0, double sd = 1) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2 * std::numbers::pi));
}

struct Rates {
  double tp, fp, fn, tn;
};

// Expected confusion counts of the rule x >= tau on the toy Gaussians.
inline Rates toy_counts(double tau, const ofc::Toy1dSpec& s = {}) {
  const double P = static_cast<double>(s.p_count), N = static_cast<double>(s.n_count);
  const double tp = P * (1 - normal_cdf(tau, s.positive_mean, s.sd));
  const double fp = N * (1 - normal_cdf(tau, s.negative_mean, s.sd));
  return {tp, fp, P - tp, N - fp};
}

inline double f_beta(const Rates& r, double beta) {
  const double b2 = beta * beta;
  return (1 + b2) * r.tp / ((1 + b2) * r.tp + b2 * r.fn + r.fp);
}

inline double accuracy(const Rates& r) { return (r.tp + r.tn) / (r.tp + r.fp + r.fn + r.tn); }

// Golden-section maximum of a unimodal function on [a, b].
template <typename Fn>
double argmax(Fn&& fn, double a, double b, double tol = 1e-10) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  while (b - a > tol) {
    if (fn(c) > fn(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

// Bayes threshold of the toy: P·φ(x-3) = N·φ(x-1)  ⇒  2x - 4 = ln(N/P).
inline double toy_bayes_threshold(const ofc::Toy1dSpec& s = {}) {
  const double m1 = s.positive_mean, m0 = s.negative_mean, v = s.sd * s.sd;
  const double lr = std::log(static_cast<double>(s.n_count) / static_cast<double>(s.p_count));
  return (v * lr + 0.5 * (m1 * m1 - m0 * m0)) / (m1 - m0);
}

// Zero crossings of sampled values by linear interpolation.
inline std::vector<double> crossings(const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i + 1 < u.size(); ++i) {
    const bool a = u[i] >= 0, b = u[i + 1] >= 0;
    if (a != b) out.push_back(x[i] + (x[i + 1] - x[i]) * u[i] / (u[i] - u[i + 1]));
  }
  return out;
}

// Exact toy Gaussians sampled on `g` and normalised there.
inline ofc::DensityPair toy_pair(const ofc::GridSpec& g, const ofc::Toy1dSpec& s = {}) {
  auto make = [&](double mean) {
    auto f = ofc::ScalarField::sample(g, [&](const Eigen::VectorXd& x) { return normal_pdf(x[0], mean, s.sd); });
    f.values() /= ofc::integrate(f);
    return f;
  };
  return {make(s.positive_mean), make(s.negative_mean), s.p_count, s.n_count};
}

}  // namespace oracle
