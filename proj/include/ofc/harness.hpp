#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ofc/classifier.hpp"
#include "ofc/data.hpp"
#include "ofc/metrics.hpp"

namespace ofc {

// Gaussian Naive Bayes ------------------------------------------------------------

struct NaiveBayes {
  Eigen::VectorXd mean_pos, var_pos;
  Eigen::VectorXd mean_neg, var_neg;
  double prior_pos = 0.5;

  /// log p(+|x) - log p(-|x); zero resolves to the positive class.
  double log_odds(const Eigen::VectorXd& x) const;
  Label predict(const Eigen::VectorXd& x) const;
  std::vector<Label> predict_all(const Eigen::MatrixXd& points) const;
};

/// Per-feature maximum-likelihood Gaussians with class priors P/(P+N) and
/// N/(P+N). Variances are raised to `var_floor`; a zero variance with
/// var_floor = 0 is degenerate_data.
NaiveBayes naive_bayes_fit(const LabeledDataset& data, double var_floor = 1e-9);

// 1-D threshold oracle -------------------------------------------------------------

struct ThresholdPoint {
  double tau;
  MetricsReport metrics;
};

struct ThresholdResult {
  double tau;
  MetricsReport best;
  /// Every swept threshold in increasing order.
  std::vector<ThresholdPoint> curve;
};

/// Sweeps `steps` equally spaced thresholds over [min, max] of the data,
/// predicting positive for x ≥ τ, and keeps the τ with the largest F_β (or
/// accuracy). Ties go to the smaller τ.
ThresholdResult threshold_oracle(const LabeledDataset& data, double beta, int steps,
                                 MeasureKind measure = MeasureKind::f_measure);

/// Same sweep on the exact class-conditional Gaussians of the toy, with
/// expected counts from the Gaussian tail integrals, over [lo, hi].
ThresholdResult threshold_oracle(const Toy1dSpec& toy, double beta, int steps,
                                 MeasureKind measure = MeasureKind::f_measure, double lo = -3.0, double hi = 7.0);

// Experiments ------------------------------------------------------------------------

enum class Method { ofc, naive_bayes, oracle };

const char* to_string(Method m);
Method parse_method(const std::string& s);

/// Dataset descriptors: `toy1d`, `db1` … `db4`, `csv:<path>`, `skin:<path>`.
/// Generated data uses `seed`.
LabeledDataset load_dataset(const std::string& descriptor, std::uint64_t seed);

struct ExperimentSpec {
  std::string dataset = "db4";
  std::vector<Method> methods{Method::ofc, Method::naive_bayes};
  TrainConfig ofc;
  int repetitions = 10;
  int folds = 10;
  std::vector<double> betas{1.0};
  std::uint64_t seed = default_seed;
  bool stratified = true;
  /// Concurrent cells; 0 uses the hardware concurrency.
  int workers = 0;

  void validate() const;
};

/// Reads `key=value` lines (# comments allowed). Keys: dataset, methods,
/// repetitions, folds, betas, seed, stratified, workers, and ofc.<TrainConfig key>.
ExperimentSpec parse_experiment(std::istream& is);
ExperimentSpec load_experiment(const std::string& path);

/// Evaluation of one fold of one repetition for one method and β.
struct FoldResult {
  Method method;
  double beta;
  int repetition;
  int fold;
  ConfusionCounts counts;
  MetricsReport metrics;
  /// Empty on success, otherwise the error that stopped this cell.
  std::string error;
  bool ok() const { return error.empty(); }
};

struct SummaryRow {
  Method method;
  double beta;
  int folds_ok;
  int failures;
  /// Means and sample standard deviations over successful folds, as fractions.
  double f_beta_mean, f_beta_std;
  double accuracy_mean, accuracy_std;
  double recall_mean, recall_std;
  double precision_mean, precision_std;
};

struct ExperimentResult {
  std::vector<FoldResult> folds;
  std::vector<SummaryRow> summary;
};

/// Runs every (method, repetition, fold) cell, each evaluating all βs, on a
/// bounded worker pool. Repetition r shuffles folds with seed + r. Results
/// are ordered by cell index. Elapsed times go to `log` when given.
ExperimentResult run_experiment(const ExperimentSpec& spec, const LabeledDataset& data,
                                std::ostream* log = nullptr);

std::vector<SummaryRow> summarize(const std::vector<FoldResult>& folds, const ExperimentSpec& spec);

/// method,beta,repetition,fold,tp,fp,fn,tn,f_beta,accuracy,recall,precision,error
void write_raw_csv(std::ostream& os, const std::vector<FoldResult>& folds);
/// Table columns in percent with two decimals.
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
/// beta then one F_β mean column per method, in percent.
void write_sweep_csv(std::ostream& os, const std::vector<SummaryRow>& rows, const std::vector<Method>& methods);

}  // namespace ofc
