#include "ofc/metrics.hpp"

#include <limits>

#include "ofc/format.hpp"
#include "ofc/smoothing.hpp"

namespace ofc {

MetricsReport metrics_from_counts(const ConfusionCounts& c, double beta) {
  if (!(beta > 0)) throw Error(ErrorCode::invalid_argument, "beta must be positive");
  if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0)
    throw Error(ErrorCode::invalid_argument, "confusion counts must be nonnegative");
  if (!(c.total() > 0)) throw Error(ErrorCode::empty_confusion, "all confusion counts are zero");

  MetricsReport m;
  m.beta = beta;
  m.accuracy = (c.tp + c.tn) / c.total();
  if (!(c.tp > 0)) {
    m.epsilon = std::numeric_limits<double>::infinity();
    m.degenerate = true;
    return m;
  }
  const double b2 = beta * beta;
  m.recall = c.tp / (c.tp + c.fn);
  m.precision = c.tp / (c.tp + c.fp);
  m.f_beta = (1 + b2) * m.recall * m.precision / (b2 * m.precision + m.recall);
  m.epsilon = (b2 * c.fn + c.fp) / c.tp;
  return m;
}

ConfusionCounts confusion_from_predictions(const std::vector<Label>& labels, const std::vector<Label>& predictions) {
  if (labels.size() != predictions.size())
    throw Error(ErrorCode::length_mismatch, "labels and predictions differ in length");
  if (labels.empty()) throw Error(ErrorCode::invalid_argument, "no predictions");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool truth = labels[i] == Label::positive;
    const bool pred = predictions[i] == Label::positive;
    if (truth && pred)
      c.tp += 1;
    else if (truth)
      c.fn += 1;
    else if (pred)
      c.fp += 1;
    else
      c.tn += 1;
  }
  return c;
}

ConfusionCounts smoothed_confusion(const ScalarField& u, const DensityPair& d, double eps_h) {
  require_same_grid(u.grid(), d.f_pos.grid(), "smoothed_confusion");
  require_same_grid(u.grid(), d.f_neg.grid(), "smoothed_confusion");
  const Eigen::VectorXd w = trapezoid_weights(u.grid());
  const auto step = smoothed_step(u.values(), eps_h);
  const Eigen::VectorXd& h_in = step.inside;
  const Eigen::VectorXd& h_out = step.outside;
  const auto p = static_cast<double>(d.p_count), n = static_cast<double>(d.n_count);
  ConfusionCounts c;
  c.tp = p * w.cwiseProduct(h_in).dot(d.f_pos.values());
  c.fn = p * w.cwiseProduct(h_out).dot(d.f_pos.values());
  c.fp = n * w.cwiseProduct(h_in).dot(d.f_neg.values());
  c.tn = n * w.cwiseProduct(h_out).dot(d.f_neg.values());
  return c;
}

std::string metrics_csv_header() { return "beta,f_beta,accuracy,recall,precision,epsilon"; }

std::string to_csv_row(const MetricsReport& m) {
  return to_text(m.beta) + "," + to_fixed(100 * m.f_beta, 2) + "," + to_fixed(100 * m.accuracy, 2) + "," +
         to_fixed(100 * m.recall, 2) + "," + to_fixed(100 * m.precision, 2) + "," + to_text(m.epsilon);
}

}  // namespace ofc
