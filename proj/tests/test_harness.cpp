#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "ofc/format.hpp"
#include "ofc/harness.hpp"

using namespace ofc;

namespace {

// Root of the log-odds by bisection on [lo, hi].
double nb_threshold(const NaiveBayes& nb, double lo, double hi) {
  auto f = [&](double x) { return nb.log_odds(Eigen::VectorXd::Constant(1, x)); };
  const bool rising = f(hi) > f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) >= 0) == rising ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

LabeledDataset one_d(const std::vector<double>& pos, const std::vector<double>& neg) {
  Eigen::MatrixXd p(static_cast<Index>(pos.size() + neg.size()), 1);
  std::vector<Label> labels;
  Index i = 0;
  for (double x : pos) p(i++, 0) = x, labels.push_back(Label::positive);
  for (double x : neg) p(i++, 0) = x, labels.push_back(Label::negative);
  return {p, labels};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("naive Bayes") {
  SUBCASE("toy threshold") {
    const auto nb = naive_bayes_fit(gen_toy1d(default_seed));
    CHECK(nb.prior_pos == doctest::Approx(1000.0 / 51000.0));
    CHECK(std::abs(nb_threshold(nb, 2, 6) - 3.956) <= 0.05);
    CHECK(oracle::toy_bayes_threshold() == doctest::Approx(2 + std::log(50.0) / 2));
  }
  SUBCASE("symmetric classes split at zero") {
    Rng rng(6);
    std::vector<double> pos, neg;
    for (int i = 0; i < 5000; ++i) {
      pos.push_back(rng.normal(1, 1));
      neg.push_back(rng.normal(-1, 1));
    }
    CHECK(std::abs(nb_threshold(naive_bayes_fit(one_d(pos, neg)), -2, 2)) <= 0.05);
  }
  SUBCASE("maximum likelihood moments in 2-D") {
    const auto d = gen_db(2, 4);
    const auto nb = naive_bayes_fit(d);
    const auto pos = d.class_points(Label::positive);
    const Eigen::RowVectorXd mu = pos.colwise().mean();
    const Eigen::RowVectorXd var = (pos.rowwise() - mu).array().square().colwise().mean();
    CHECK((nb.mean_pos.transpose() - mu).norm() < 1e-12);
    CHECK((nb.var_pos.transpose() - var).norm() < 1e-12);
    const auto labels = nb.predict_all(d.points());
    for (Index i = 0; i < d.size(); i += 97)
      CHECK(labels[static_cast<std::size_t>(i)] == nb.predict(d.points().row(i).transpose()));
  }
  SUBCASE("zero variance") {
    const auto d = one_d({2, 2, 2}, {0, 1, 3});
    CHECK(code_of([&] { naive_bayes_fit(d, 0.0); }) == ErrorCode::degenerate_data);
    CHECK_NOTHROW(naive_bayes_fit(d));
  }
  SUBCASE("too few samples") {
    CHECK(code_of([] { naive_bayes_fit(one_d({1}, {0, 1, 3})); }) == ErrorCode::insufficient_class_samples);
  }
}

TEST_CASE("threshold oracle on the analytic toy") {
  const Toy1dSpec toy;
  const auto coarse = threshold_oracle(toy, 1, 2000);
  const double step = 10.0 / 1999;
  SUBCASE("refining the sweep moves tau by less than a step") {
    const auto fine = threshold_oracle(toy, 1, 20000);
    CHECK(std::abs(fine.tau - coarse.tau) < step);
    const double exact = oracle::argmax([](double t) { return oracle::f_beta(oracle::toy_counts(t), 1); }, 1, 6);
    CHECK(std::abs(coarse.tau - exact) < step);
    CHECK(coarse.best.f_beta == doctest::Approx(oracle::f_beta(oracle::toy_counts(coarse.tau), 1)).epsilon(1e-9));
  }
  SUBCASE("large beta moves the threshold left") {
    CHECK(threshold_oracle(toy, 100, 2000).tau < coarse.tau);
  }
  SUBCASE("accuracy sweep lands on the Bayes threshold") {
    const auto acc = threshold_oracle(toy, 1, 2000, MeasureKind::accuracy);
    CHECK(std::abs(acc.tau - oracle::toy_bayes_threshold()) <= 2 * step);
  }
  SUBCASE("curve shapes") {
    const auto& c = coarse.curve;
    REQUIRE(c.size() == 2000);
    int peaks = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i].tau < 1 || c[i].tau > 6) continue;
      CHECK(c[i].metrics.precision >= c[i - 1].metrics.precision - 1e-12);
      CHECK(c[i].metrics.recall <= c[i - 1].metrics.recall + 1e-12);
      if (i + 1 < c.size())
        peaks += c[i].metrics.f_beta > c[i - 1].metrics.f_beta && c[i].metrics.f_beta >= c[i + 1].metrics.f_beta;
    }
    CHECK(peaks == 1);
  }
}

TEST_CASE("threshold oracle on samples") {
  SUBCASE("disjoint supports pick the smallest perfect threshold") {
    const auto d = one_d({5, 6, 7, 8}, {0, 1, 2});
    const auto r = threshold_oracle(d, 1, 801);
    CHECK(r.best.f_beta == 1.0);
    // Sweep over [0, 8] in steps of 0.01: first τ above 2 is 2.01.
    CHECK(r.tau == doctest::Approx(2.01));
  }
  SUBCASE("agrees with a brute-force count") {
    const auto d = gen_toy1d(4);
    const auto r = threshold_oracle(d, 1, 500);
    double best = -1;
    const double lo = d.points().minCoeff(), hi = d.points().maxCoeff();
    for (int i = 0; i < 500; ++i) {
      const double tau = lo + (hi - lo) * i / 499.0;
      double tp = 0, fp = 0, fn = 0;
      for (Index j = 0; j < d.size(); ++j) {
        const bool pred = d.points()(j, 0) >= tau, truth = d.labels()[static_cast<std::size_t>(j)] == Label::positive;
        tp += pred && truth;
        fp += pred && !truth;
        fn += !pred && truth;
      }
      best = std::max(best, tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0);
    }
    CHECK(r.best.f_beta == doctest::Approx(best).epsilon(1e-12));
  }
  SUBCASE("two features") {
    CHECK(code_of([] { threshold_oracle(gen_db(1, 1), 1, 10); }) == ErrorCode::dimension_error);
  }
}

TEST_CASE("experiment files") {
  std::stringstream ss(
      "# comment\n"
      "dataset = db3\n"
      "methods = ofc, nb\n"
      "repetitions = 2\n"
      "folds = 5\n"
      "betas = 0.5, 1, 2\n"
      "seed = 11\n"
      "stratified = false\n"
      "workers = 3\n"
      "ofc.resolution = 32 32\n"
      "ofc.measure = accuracy\n");
  const auto spec = parse_experiment(ss);
  CHECK(spec.dataset == "db3");
  CHECK(spec.methods == std::vector<Method>{Method::ofc, Method::naive_bayes});
  CHECK(spec.repetitions == 2);
  CHECK(spec.folds == 5);
  CHECK(spec.betas == std::vector<double>{0.5, 1, 2});
  CHECK(spec.seed == 11);
  CHECK_FALSE(spec.stratified);
  CHECK(spec.workers == 3);
  CHECK(spec.ofc.resolution == std::vector<Index>{32, 32});
  CHECK(spec.ofc.measure == MeasureKind::accuracy);

  std::stringstream bad("repetitions = 0\n");
  CHECK_THROWS_AS(parse_experiment(bad), Error);
  std::stringstream unknown("colour = red\n");
  CHECK(code_of([&] { parse_experiment(unknown); }) == ErrorCode::parse_error);
  std::stringstream negative("betas = 1, -2\n");
  CHECK_THROWS_AS(parse_experiment(negative), Error);
}

TEST_CASE("datasets by name") {
  CHECK(load_dataset("toy1d", 1).size() == 51000);
  CHECK(load_dataset("db2", 1).p_count() == 1000);
  CHECK_THROWS_AS(load_dataset("db9", 1), Error);
  CHECK_THROWS_AS(load_dataset("mnist", 1), Error);
}

TEST_CASE("experiment runs") {
  SUBCASE("ten samples, two folds") {
    const auto d = one_d({2.1, 2.5, 3.0, 3.2, 3.9}, {0.1, 0.4, 1.0, 1.3, 2.2});
    ExperimentSpec spec;
    spec.dataset = "csv:inline";
    spec.repetitions = 1;
    spec.folds = 2;
    spec.ofc.resolution = {64};
    const auto r = run_experiment(spec, d);
    REQUIRE(r.summary.size() == 2);
    for (const auto& row : r.summary) {
      CHECK(row.failures == 0);
      CHECK(row.folds_ok == 2);
    }
    CHECK(r.folds.size() == 4);
  }
  SUBCASE("summary is recomputable from the raw rows and independent of the worker count") {
    const auto d = gen_toy1d(5);
    ExperimentSpec spec;
    spec.methods = {Method::naive_bayes, Method::oracle};
    spec.repetitions = 3;
    spec.folds = 4;
    spec.betas = {0.5, 1};
    spec.workers = 1;
    const auto a = run_experiment(spec, d);
    spec.workers = 4;
    const auto b = run_experiment(spec, d);
    std::stringstream ra, rb;
    write_raw_csv(ra, a.folds);
    write_raw_csv(rb, b.folds);
    CHECK(ra.str() == rb.str());
    REQUIRE(a.folds.size() == 2 * 3 * 4 * 2);

    // Re-read f_beta per (method, beta) from the raw text.
    std::map<std::pair<std::string, std::string>, std::vector<double>> f;
    std::string line;
    std::getline(ra, line);
    while (std::getline(ra, line)) {
      const auto cols = split(line, ',');
      f[{std::string(cols[0]), std::string(cols[1])}].push_back(*parse_double(cols[8]));
    }
    for (const auto& row : a.summary) {
      const auto& v = f.at({to_string(row.method), to_text(row.beta)});
      REQUIRE(v.size() == 12);
      double m = 0, s = 0;
      for (double x : v) m += x;
      m /= 12;
      for (double x : v) s += (x - m) * (x - m);
      CHECK(row.f_beta_mean == doctest::Approx(m).epsilon(1e-12));
      CHECK(row.f_beta_std == doctest::Approx(std::sqrt(s / 11)).epsilon(1e-12));
    }
  }
  SUBCASE("failures are recorded per cell") {
    // Two cells per axis is below the training minimum, so every OFC cell fails.
    const auto d = one_d({2.1, 2.5, 3.0, 3.2, 3.9}, {0.1, 0.4, 1.0, 1.3, 2.2});
    ExperimentSpec spec;
    spec.repetitions = 1;
    spec.folds = 2;
    spec.ofc.resolution = {2};
    const auto r = run_experiment(spec, d);
    REQUIRE(r.summary.size() == 2);
    CHECK(r.summary[0].failures == 2);
    CHECK(r.summary[0].folds_ok == 0);
    CHECK(r.summary[1].failures == 0);
    std::stringstream raw;
    write_raw_csv(raw, r.folds);
    CHECK(raw.str().find("ofc,1,0,0,,,,,,,,,") != std::string::npos);
  }
}

TEST_CASE("result files") {
  std::vector<SummaryRow> rows = {
      {Method::ofc, 0.5, 10, 0, 0.33674, 0.0014, 0.8, 0.01, 0.7825, 0.02, 0.2145, 0.03},
      {Method::naive_bayes, 0.5, 9, 1, 0.0154, 0.0042, 0.9, 0.0, 0.0081, 0.0, 0.1637, 0.0},
  };
  std::stringstream s;
  write_summary_csv(s, rows);
  CHECK(s.str().find("ofc,0.5,33.67,0.14,80.00,1.00,78.25,2.00,21.45,3.00,10,0\n") != std::string::npos);
  CHECK(s.str().find("nb,0.5,1.54,0.42,") != std::string::npos);
  std::stringstream w;
  write_sweep_csv(w, rows, {Method::ofc, Method::naive_bayes});
  CHECK(w.str() == "beta,ofc,nb\n0.5,33.67,1.54\n");
}
