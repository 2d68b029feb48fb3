#pragma once

#include <Eigen/Core>

#include <optional>

#include "ofc/data.hpp"
#include "ofc/field.hpp"

namespace ofc {

/// Per-axis KDE bandwidth: Scott's rule unless explicit values are given.
struct BandwidthRule {
  std::optional<Eigen::VectorXd> fixed;

  static BandwidthRule scott() { return {}; }
  static BandwidthRule constant(double h) { return {Eigen::VectorXd::Constant(1, h)}; }
};

/// Gaussian product-kernel density estimate.
struct KdeModel {
  Eigen::MatrixXd samples;  // one sample per row
  Eigen::VectorXd bandwidth;

  int dim() const { return static_cast<int>(samples.cols()); }
  /// Density at `x`, evaluated directly from the samples.
  double operator()(const Eigen::VectorXd& x) const;
};

/// σ̂_a · m^(-1/(d+4)) with σ̂_a the sample standard deviation of axis a.
Eigen::VectorXd scott_bandwidth(const Eigen::MatrixXd& samples);

KdeModel fit_kde(Eigen::MatrixXd samples, const BandwidthRule& rule = BandwidthRule::scott());

/// KDE sampled at every grid node, rescaled so its trapezoidal integral is 1.
ScalarField density_on_grid(const KdeModel& model, const GridSpec& grid);

/// Class-conditional densities on one grid plus the class counts.
struct DensityPair {
  ScalarField f_pos;
  ScalarField f_neg;
  Index p_count = 0;
  Index n_count = 0;

  const GridSpec& grid() const { return f_pos.grid(); }
};

DensityPair estimate_pair(const LabeledDataset& data, const GridSpec& grid,
                          const BandwidthRule& rule = BandwidthRule::scott());

}  // namespace ofc
