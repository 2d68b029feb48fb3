#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ofc/data.hpp"
#include "ofc/density.hpp"
#include "ofc/energy.hpp"
#include "ofc/metrics.hpp"
#include "ofc/solver.hpp"

namespace ofc {

/// A fitted decision field: u ≥ 0 is the positive class.
struct TrainedClassifier {
  ScalarField u;
  MeasureEnergy measure;
  TrainConfig config;
  std::uint64_t densities_hash = 0;

  const GridSpec& grid() const { return u.grid(); }
  /// True when u has a single sign, so every point gets the same class.
  bool degenerate() const;
  /// FNV-1a over the field values, measure and densities hash.
  std::uint64_t fingerprint() const;
};

struct FitResult {
  TrainedClassifier model;
  EvolutionTrace trace;
};

/// Grid over the data bounds padded by 10%, class densities, the measure
/// energy with k = β²P/N, then the level-set flow.
FitResult fit(const LabeledDataset& data, const TrainConfig& cfg,
              const BandwidthRule& bandwidth = BandwidthRule::scott());

/// Same as fit but with densities supplied by the caller.
FitResult fit_densities(const DensityPair& densities, const TrainConfig& cfg);

std::uint64_t densities_hash(const DensityPair& d);

struct Prediction {
  Label label;
  /// The point was outside the grid and projected onto it.
  bool clamped;
};

Prediction predict(const TrainedClassifier& m, const Eigen::VectorXd& x);
/// One prediction per row of `points`.
std::vector<Prediction> predict_all(const TrainedClassifier& m, const Eigen::MatrixXd& points);
std::vector<Label> labels_of(const std::vector<Prediction>& p);

ConfusionCounts confusion(const TrainedClassifier& m, const LabeledDataset& data);

using Polyline = std::vector<Eigen::VectorXd>;

/// Zero level set of u. 1-D: interpolated thresholds. 2-D: marching-squares
/// polylines, closed ones repeating their first vertex at the end. Higher
/// dimensions: midpoints of the grid edges whose end nodes differ in class.
struct Frontier {
  int dim = 0;
  std::vector<double> thresholds;
  std::vector<Polyline> polylines;
  std::vector<Eigen::VectorXd> points;
};

Frontier frontier(const TrainedClassifier& m);
Frontier frontier(const ScalarField& u);

/// CSV of vertex coordinates with header x0,x1,...; 2-D polylines are
/// separated by blank lines.
void write_frontier_csv(std::ostream& os, const Frontier& f);
void save_frontier_csv(const std::string& path, const Frontier& f);

inline constexpr int model_format_version = 1;

void write_model(std::ostream& os, const TrainedClassifier& m);
TrainedClassifier read_model(std::istream& is);
void save_model(const std::string& path, const TrainedClassifier& m);
TrainedClassifier load_model(const std::string& path);

/// `key=value` lines for every TrainConfig field; parse_config_entry applies
/// one of them and returns false for an unknown key.
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& cfg);
bool parse_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value);

}  // namespace ofc
