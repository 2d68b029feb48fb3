#include "ofc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "ofc/format.hpp"

namespace ofc {

// Naive Bayes ------------------------------------------------------------------------

namespace {

double log_gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::VectorXd& var) {
  double s = 0;
  for (Index a = 0; a < x.size(); ++a) {
    const double z = x[a] - mean[a];
    s -= 0.5 * (std::log(2 * std::numbers::pi * var[a]) + z * z / var[a]);
  }
  return s;
}

}  // namespace

double NaiveBayes::log_odds(const Eigen::VectorXd& x) const {
  if (x.size() != mean_pos.size()) throw Error(ErrorCode::invalid_argument, "naive bayes: point dimension mismatch");
  return std::log(prior_pos) - std::log1p(-prior_pos) + log_gaussian(x, mean_pos, var_pos) -
         log_gaussian(x, mean_neg, var_neg);
}

Label NaiveBayes::predict(const Eigen::VectorXd& x) const {
  return log_odds(x) >= 0 ? Label::positive : Label::negative;
}

std::vector<Label> NaiveBayes::predict_all(const Eigen::MatrixXd& points) const {
  std::vector<Label> out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) out[static_cast<std::size_t>(i)] = predict(points.row(i).transpose());
  return out;
}

NaiveBayes naive_bayes_fit(const LabeledDataset& data, double var_floor) {
  if (data.p_count() < 2 || data.n_count() < 2)
    throw Error(ErrorCode::insufficient_class_samples, "naive bayes: need at least 2 samples per class");
  if (!(var_floor >= 0)) throw Error(ErrorCode::invalid_argument, "naive bayes: variance floor must be nonnegative");
  NaiveBayes nb;
  auto moments = [&](Label label, Eigen::VectorXd& mean, Eigen::VectorXd& var) {
    const Eigen::MatrixXd x = data.class_points(label);
    mean = x.colwise().mean().transpose();
    var = (x.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
    for (Index a = 0; a < var.size(); ++a) {
      var[a] = std::max(var[a], var_floor);
      if (!(var[a] > 0))
        throw Error(ErrorCode::degenerate_data, std::string("naive bayes: zero variance in feature ") +
                                                    std::to_string(a) + " of the " +
                                                    (label == Label::positive ? "positive" : "negative") + " class");
    }
  };
  moments(Label::positive, nb.mean_pos, nb.var_pos);
  moments(Label::negative, nb.mean_neg, nb.var_neg);
  nb.prior_pos = static_cast<double>(data.p_count()) / static_cast<double>(data.size());
  return nb;
}

// Threshold oracle ---------------------------------------------------------------------

namespace {

double score(const MetricsReport& m, MeasureKind measure) {
  return measure == MeasureKind::accuracy ? m.accuracy : m.f_beta;
}

template <typename CountsAt>
ThresholdResult sweep(double lo, double hi, int steps, double beta, MeasureKind measure, CountsAt counts_at) {
  if (steps < 2) throw Error(ErrorCode::invalid_argument, "threshold oracle: steps must be at least 2");
  ThresholdResult r{lo, {}, {}};
  r.curve.reserve(static_cast<std::size_t>(steps));
  double best = -1;
  for (int i = 0; i < steps; ++i) {
    const double tau = i + 1 == steps ? hi : lo + (hi - lo) * i / (steps - 1);
    const MetricsReport m = metrics_from_counts(counts_at(tau), beta);
    r.curve.push_back({tau, m});
    if (score(m, measure) > best) {
      best = score(m, measure);
      r.tau = tau;
      r.best = m;
    }
  }
  return r;
}

}  // namespace

ThresholdResult threshold_oracle(const LabeledDataset& data, double beta, int steps, MeasureKind measure) {
  if (data.dim() != 1)
    throw Error(ErrorCode::dimension_error, "threshold oracle: data is " + std::to_string(data.dim()) + "-D, needs 1-D");
  if (data.size() == 0) throw Error(ErrorCode::invalid_argument, "threshold oracle: empty dataset");
  std::vector<std::pair<double, bool>> v(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i)
    v[static_cast<std::size_t>(i)] = {data.points()(i, 0), data.labels()[static_cast<std::size_t>(i)] == Label::positive};
  std::sort(v.begin(), v.end());
  const double p = static_cast<double>(data.p_count()), n = static_cast<double>(data.n_count());
  std::size_t below = 0;
  double pos_below = 0, neg_below = 0;
  return sweep(v.front().first, v.back().first, steps, beta, measure, [&](double tau) {
    while (below < v.size() && v[below].first < tau) {
      (v[below].second ? pos_below : neg_below) += 1;
      ++below;
    }
    return ConfusionCounts{p - pos_below, n - neg_below, pos_below, neg_below};
  });
}

ThresholdResult threshold_oracle(const Toy1dSpec& toy, double beta, int steps, MeasureKind measure, double lo,
                                 double hi) {
  if (!(lo < hi)) throw Error(ErrorCode::invalid_argument, "threshold oracle: empty range");
  const double p = static_cast<double>(toy.p_count), n = static_cast<double>(toy.n_count);
  auto upper_tail = [&](double tau, double mean) { return 0.5 * std::erfc((tau - mean) / (toy.sd * std::numbers::sqrt2)); };
  return sweep(lo, hi, steps, beta, measure, [&](double tau) {
    const double tp = p * upper_tail(tau, toy.positive_mean);
    const double fp = n * upper_tail(tau, toy.negative_mean);
    return ConfusionCounts{tp, fp, p - tp, n - fp};
  });
}

// Experiment spec ------------------------------------------------------------------------

const char* to_string(Method m) {
  switch (m) {
    case Method::ofc:
      return "ofc";
    case Method::naive_bayes:
      return "nb";
    case Method::oracle:
      return "oracle";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "ofc") return Method::ofc;
  if (s == "nb" || s == "naive_bayes") return Method::naive_bayes;
  if (s == "oracle") return Method::oracle;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + s + "'");
}

LabeledDataset load_dataset(const std::string& descriptor, std::uint64_t seed) {
  if (descriptor == "toy1d") return gen_toy1d(seed);
  if (descriptor.size() == 3 && descriptor.rfind("db", 0) == 0 && descriptor[2] >= '0' && descriptor[2] <= '9')
    return gen_db(descriptor[2] - '0', seed);
  if (descriptor.rfind("csv:", 0) == 0) return load_csv(descriptor.substr(4));
  if (descriptor.rfind("skin:", 0) == 0) return load_skin(descriptor.substr(5));
  throw Error(ErrorCode::invalid_argument, "unknown dataset '" + descriptor + "'");
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw Error(ErrorCode::invalid_argument, "repetitions must be at least 1");
  if (folds < 2) throw Error(ErrorCode::invalid_argument, "folds must be at least 2");
  if (methods.empty()) throw Error(ErrorCode::invalid_argument, "no methods");
  if (betas.empty()) throw Error(ErrorCode::invalid_argument, "empty beta grid");
  for (double b : betas)
    if (!(b > 0) || !std::isfinite(b)) throw Error(ErrorCode::invalid_argument, "beta values must be positive");
  if (workers < 0) throw Error(ErrorCode::invalid_argument, "workers must be nonnegative");
}

ExperimentSpec parse_experiment(std::istream& is) {
  ExperimentSpec spec;
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::parse_error, "experiment line " + std::to_string(line_no) + ": " + why);
  };
  auto integer = [&](std::string_view v) {
    auto x = parse_integer(v);
    if (!x) throw fail("bad integer '" + std::string(v) + "'");
    return *x;
  };
  while (std::getline(is, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (key == "dataset") {
        spec.dataset = std::string(value);
      } else if (key == "methods") {
        spec.methods.clear();
        for (auto m : split(value, ',')) spec.methods.push_back(parse_method(std::string(trim(m))));
      } else if (key == "repetitions") {
        spec.repetitions = static_cast<int>(integer(value));
      } else if (key == "folds") {
        spec.folds = static_cast<int>(integer(value));
      } else if (key == "betas") {
        spec.betas.clear();
        for (auto b : split(value, ',')) {
          auto x = parse_double(trim(b));
          if (!x) throw fail("bad beta '" + std::string(b) + "'");
          spec.betas.push_back(*x);
        }
      } else if (key == "seed") {
        spec.seed = static_cast<std::uint64_t>(integer(value));
      } else if (key == "stratified") {
        spec.stratified = value == "1" || value == "true";
        if (!spec.stratified && value != "0" && value != "false") throw fail("stratified must be true or false");
      } else if (key == "workers") {
        spec.workers = static_cast<int>(integer(value));
      } else if (key.rfind("ofc.", 0) == 0) {
        if (!parse_config_entry(spec.ofc, key.substr(4), std::string(value))) throw fail("unknown key '" + key + "'");
      } else {
        throw fail("unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::parse_error) throw;
      throw fail(e.what());
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_failure, "cannot read " + path);
  return parse_experiment(is);
}

// Running ------------------------------------------------------------------------------

namespace {

struct Cell {
  Method method;
  int repetition;
  int fold;
};

std::vector<FoldResult> run_cell(const ExperimentSpec& spec, const Cell& cell, const LabeledDataset& train,
                                 const LabeledDataset& test) {
  std::vector<FoldResult> out;
  auto record = [&](double beta, const std::vector<Label>& predicted) {
    FoldResult r{cell.method, beta, cell.repetition, cell.fold, {}, {}, {}};
    r.counts = confusion_from_predictions(test.labels(), predicted);
    r.metrics = metrics_from_counts(r.counts, beta);
    out.push_back(std::move(r));
  };
  switch (cell.method) {
    case Method::naive_bayes: {
      const auto predicted = naive_bayes_fit(train).predict_all(test.points());
      for (double b : spec.betas) record(b, predicted);
      break;
    }
    case Method::oracle: {
      for (double b : spec.betas) {
        const double tau = threshold_oracle(train, b, 2000, spec.ofc.measure).tau;
        std::vector<Label> predicted(static_cast<std::size_t>(test.size()));
        for (Index i = 0; i < test.size(); ++i)
          predicted[static_cast<std::size_t>(i)] = test.points()(i, 0) >= tau ? Label::positive : Label::negative;
        record(b, predicted);
      }
      break;
    }
    case Method::ofc: {
      TrainConfig cfg = spec.ofc;
      if (cfg.resolution.empty()) cfg.resolution = default_resolution(train.dim());
      const DensityPair d = estimate_pair(train, bounding_grid(train.points(), cfg.resolution, 0.1));
      std::optional<std::vector<Label>> shared;
      for (double b : spec.betas) {
        if (cfg.measure == MeasureKind::accuracy && shared) {
          record(b, *shared);
          continue;
        }
        cfg.beta = b;
        const auto model = fit_densities(d, cfg).model;
        shared = labels_of(predict_all(model, test.points()));
        record(b, *shared);
      }
      break;
    }
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const LabeledDataset& data, std::ostream* log) {
  spec.validate();
  std::vector<std::vector<Fold>> splits;
  for (int r = 0; r < spec.repetitions; ++r)
    splits.push_back(kfold(data, spec.folds, spec.seed + static_cast<std::uint64_t>(r), spec.stratified));

  std::vector<Cell> cells;
  for (Method m : spec.methods)
    for (int r = 0; r < spec.repetitions; ++r)
      for (int f = 0; f < spec.folds; ++f) cells.push_back({m, r, f});

  std::vector<std::vector<FoldResult>> results(cells.size());
  std::vector<double> seconds(cells.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const Cell& cell = cells[c];
      const Fold& fold = splits[static_cast<std::size_t>(cell.repetition)][static_cast<std::size_t>(cell.fold)];
      const auto start = std::chrono::steady_clock::now();
      try {
        results[c] = run_cell(spec, cell, data.subset(fold.train), data.subset(fold.test));
      } catch (const std::exception& e) {
        results[c].clear();
        for (double b : spec.betas) results[c].push_back({cell.method, b, cell.repetition, cell.fold, {}, {}, e.what()});
      }
      seconds[c] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      std::min<std::size_t>(cells.size(), spec.workers > 0 ? static_cast<std::size_t>(spec.workers) : hw);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  ExperimentResult out;
  for (auto& r : results)
    for (auto& f : r) out.folds.push_back(std::move(f));
  out.summary = summarize(out.folds, spec);

  if (log) {
    for (Method m : spec.methods) {
      double total = 0;
      for (std::size_t c = 0; c < cells.size(); ++c)
        if (cells[c].method == m) total += seconds[c];
      *log << to_string(m) << ": " << to_fixed(total, 2) << " s over " << spec.repetitions * spec.folds
           << " folds\n";
    }
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<FoldResult>& folds, const ExperimentSpec& spec) {
  std::vector<SummaryRow> rows;
  for (Method m : spec.methods) {
    for (double b : spec.betas) {
      std::vector<double> f, acc, rec, pre;
      int failures = 0;
      for (const auto& r : folds) {
        if (r.method != m || r.beta != b) continue;
        if (!r.ok()) {
          ++failures;
          continue;
        }
        f.push_back(r.metrics.f_beta);
        acc.push_back(r.metrics.accuracy);
        rec.push_back(r.metrics.recall);
        pre.push_back(r.metrics.precision);
      }
      rows.push_back({m, b, static_cast<int>(f.size()), failures, mean_of(f), sd_of(f), mean_of(acc), sd_of(acc),
                      mean_of(rec), sd_of(rec), mean_of(pre), sd_of(pre)});
    }
  }
  return rows;
}

void write_raw_csv(std::ostream& os, const std::vector<FoldResult>& folds) {
  os << "method,beta,repetition,fold,tp,fp,fn,tn,f_beta,accuracy,recall,precision,error\n";
  for (const auto& r : folds) {
    os << to_string(r.method) << ',' << to_text(r.beta) << ',' << r.repetition << ',' << r.fold << ',';
    if (r.ok()) {
      os << to_text(r.counts.tp) << ',' << to_text(r.counts.fp) << ',' << to_text(r.counts.fn) << ','
         << to_text(r.counts.tn) << ',' << to_text(r.metrics.f_beta) << ',' << to_text(r.metrics.accuracy) << ','
         << to_text(r.metrics.recall) << ',' << to_text(r.metrics.precision) << ',';
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      os << ",,,,,,,," << msg;
    }
    os << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "# per-fold confusion counts pooled within each fold; mean and sample sd across folds and repetitions; "
        "rates in percent\n";
  os << "method,beta,f_beta_mean,f_beta_std,accuracy_mean,accuracy_std,recall_mean,recall_std,precision_mean,"
        "precision_std,folds,failures\n";
  auto pct = [](double v) { return to_fixed(100 * v, 2); };
  for (const auto& r : rows) {
    os << to_string(r.method) << ',' << to_text(r.beta) << ',' << pct(r.f_beta_mean) << ',' << pct(r.f_beta_std)
       << ',' << pct(r.accuracy_mean) << ',' << pct(r.accuracy_std) << ',' << pct(r.recall_mean) << ','
       << pct(r.recall_std) << ',' << pct(r.precision_mean) << ',' << pct(r.precision_std) << ',' << r.folds_ok
       << ',' << r.failures << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SummaryRow>& rows, const std::vector<Method>& methods) {
  os << "beta";
  for (Method m : methods) os << ',' << to_string(m);
  os << '\n';
  std::vector<double> betas;
  for (const auto& r : rows)
    if (std::find(betas.begin(), betas.end(), r.beta) == betas.end()) betas.push_back(r.beta);
  for (double b : betas) {
    os << to_text(b);
    for (Method m : methods) {
      os << ',';
      for (const auto& r : rows)
        if (r.method == m && r.beta == b && r.folds_ok > 0) os << to_fixed(100 * r.f_beta_mean, 2);
    }
    os << '\n';
  }
}

}  // namespace ofc
