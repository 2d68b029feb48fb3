#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ofc/field.hpp"

namespace ofc {

enum class Label : std::int8_t { negative = 0, positive = 1 };

/// Feature vectors (one per row) with binary labels.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(Eigen::MatrixXd points, std::vector<Label> labels);

  const Eigen::MatrixXd& points() const { return points_; }
  const std::vector<Label>& labels() const { return labels_; }
  Index size() const { return points_.rows(); }
  int dim() const { return static_cast<int>(points_.cols()); }
  Index p_count() const { return p_count_; }
  Index n_count() const { return size() - p_count_; }

  /// Rows of one class, in dataset order.
  Eigen::MatrixXd class_points(Label label) const;
  LabeledDataset subset(const std::vector<Index>& rows) const;

 private:
  Eigen::MatrixXd points_;
  std::vector<Label> labels_;
  Index p_count_ = 0;
};

/// mt19937_64 with explicitly defined transforms, so a seed yields the same
/// samples with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Uniform integer in [0, n).
  Index below(Index n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (Index i = static_cast<Index>(v.size()) - 1; i > 0; --i)
      std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(below(i + 1))]);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Synthetic data ----------------------------------------------------------

inline constexpr std::uint64_t default_seed = 1;

/// 1000 positives ~ N(3, 1) and 50000 negatives ~ N(1, 1).
struct Toy1dSpec {
  Index p_count = 1000;
  Index n_count = 50000;
  double positive_mean = 3.0;
  double negative_mean = 1.0;
  double sd = 1.0;
};

LabeledDataset gen_toy1d(std::uint64_t seed, const Toy1dSpec& spec = {});

/// Frozen generator parameters for the four 2-D databases.
///
/// 1 and 4: isotropic Gaussian negatives at the origin, positives on a ring
///          with Gaussian radial noise (5000/5000 and 1000/10000).
/// 2:       three Gaussian modes per class on alternating sites of a 3x2
///          lattice (1000 positive / 10000 negative).
/// 3:       positives on the upper half of a noisy ring (horseshoe) wrapping
///          Gaussian negatives (1000 / 10000).
namespace db {
inline constexpr double negative_sd = 1.5;
inline constexpr double ring_radius = 3.0;
inline constexpr double ring_noise = 0.8;
inline constexpr double mode_sd = 1.0;
inline constexpr double horseshoe_radius = 3.0;
inline constexpr double horseshoe_thickness = 0.5;
}  // namespace db

LabeledDataset gen_db(int which, std::uint64_t seed);

// Files -------------------------------------------------------------------

struct CsvOptions {
  /// Column holding the label; negative counts from the end (-1 = last).
  int label_column = -1;
  std::string positive_value = "1";
  char separator = ',';
  bool has_header = false;
};

/// A first row without any numeric field is taken as a header and skipped.
LabeledDataset load_csv(const std::string& path, const CsvOptions& options = {});
/// Every column as a feature; same header rule as load_csv.
Eigen::MatrixXd load_points(const std::string& path, char separator = ',');
void save_csv(const std::string& path, const LabeledDataset& data, bool header = true);

/// UCI Skin Segmentation file: tab-separated `B G R label`, label 1 = skin
/// (positive), 2 = non-skin (negative).
LabeledDataset load_skin(const std::string& path);

inline constexpr Index skin_positive_count = 50859;
inline constexpr Index skin_negative_count = 194198;

/// Message when the class totals differ from the canonical UCI file.
std::optional<std::string> skin_count_warning(const LabeledDataset& data);

// Cross-validation ---------------------------------------------------------

struct Fold {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// k disjoint test folds covering every row once. Stratified folds deal each
/// class round-robin, so per-fold class counts differ by at most one.
std::vector<Fold> kfold(const LabeledDataset& data, int k, std::uint64_t seed, bool stratified = true);

}  // namespace ofc
