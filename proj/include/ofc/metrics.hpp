#pragma once

#include <string>
#include <vector>

#include "ofc/data.hpp"
#include "ofc/density.hpp"
#include "ofc/field.hpp"

namespace ofc {

/// Confusion-matrix entries. Real-valued so smoothed integral estimates fit.
struct ConfusionCounts {
  double tp = 0, fp = 0, fn = 0, tn = 0;

  double total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
};

struct MetricsReport {
  double beta = 1;
  double accuracy = 0;
  double recall = 0;
  double precision = 0;
  double f_beta = 0;
  /// (β²·FN + FP) / TP; +∞ when TP = 0 (see `degenerate`).
  double epsilon = 0;
  bool degenerate = false;
};

MetricsReport metrics_from_counts(const ConfusionCounts& c, double beta);

/// F_β written through ε: (1 + β²) / ((1 + β²) + ε).
inline double f_beta_from_epsilon(double epsilon, double beta) {
  const double b2 = beta * beta;
  return (1 + b2) / ((1 + b2) + epsilon);
}

ConfusionCounts confusion_from_predictions(const std::vector<Label>& labels, const std::vector<Label>& predictions);

/// Counts estimated from class densities: TP = P∫H(u)f₊, FN = P∫H(-u)f₊,
/// FP = N∫H(u)f₋, TN = N∫H(-u)f₋ with the logistic H of width `eps_h`.
ConfusionCounts smoothed_confusion(const ScalarField& u, const DensityPair& d, double eps_h);

/// CSV row `beta,f_beta,accuracy,recall,precision,epsilon`; the four rates
/// are percentages with two decimals.
std::string metrics_csv_header();
std::string to_csv_row(const MetricsReport& m);

}  // namespace ofc
