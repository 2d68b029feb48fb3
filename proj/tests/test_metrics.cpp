#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ofc/metrics.hpp"
#include "ofc/smoothing.hpp"

using namespace ofc;

namespace {

// Counts with the requested recall and precision (scaled to TP = 1).
ConfusionCounts from_rates(double recall, double precision) {
  ConfusionCounts c;
  c.tp = 1;
  c.fn = 1 / recall - 1;
  c.fp = 1 / precision - 1;
  c.tn = 10;
  return c;
}

}  // namespace

TEST_CASE("table rows from recall and precision") {
  CHECK(std::abs(100 * metrics_from_counts(from_rates(0.7825, 0.2145), 1).f_beta - 33.67) <= 0.05);
  CHECK(std::abs(100 * metrics_from_counts(from_rates(0.0081, 0.1637), 1).f_beta - 1.54) <= 0.05);
}

TEST_CASE("direct formula") {
  const auto m = metrics_from_counts({50, 0, 50, 0}, 1);
  CHECK(m.recall == doctest::Approx(0.5));
  CHECK(m.precision == doctest::Approx(1.0));
  CHECK(m.f_beta == doctest::Approx(2.0 / 3.0));
  CHECK(m.accuracy == doctest::Approx(0.5));
  CHECK(m.epsilon == doctest::Approx(1.0));
}

TEST_CASE("degenerate and empty counts") {
  const auto m = metrics_from_counts({0, 3, 4, 5}, 1);
  CHECK(m.degenerate);
  CHECK(std::isinf(m.epsilon));
  CHECK(m.f_beta == 0);
  CHECK(m.accuracy == doctest::Approx(5.0 / 12.0));
  try {
    metrics_from_counts({}, 1);
    FAIL("expected empty_confusion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_confusion);
  }
}

TEST_CASE("random counts: epsilon link, monotonicity and beta limits") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.5, 500);
  for (int trial = 0; trial < 300; ++trial) {
    const ConfusionCounts c{U(rng), U(rng), U(rng), U(rng)};
    const double beta = std::uniform_real_distribution<double>(0.1, 5)(rng);
    const auto m = metrics_from_counts(c, beta);
    CHECK(std::abs(m.f_beta - f_beta_from_epsilon(m.epsilon, beta)) <= 1e-12);
    for (double v : {m.accuracy, m.recall, m.precision, m.f_beta}) {
      CHECK(v >= 0);
      CHECK(v <= 1);
    }
    // Adding errors raises ε and lowers F.
    ConfusionCounts worse = c;
    worse.fp += U(rng);
    const auto w = metrics_from_counts(worse, beta);
    CHECK(w.epsilon > m.epsilon);
    CHECK(w.f_beta < m.f_beta);

    CHECK(std::abs(metrics_from_counts(c, 100).f_beta - m.recall) <= 1e-2);
    CHECK(std::abs(metrics_from_counts(c, 0.01).f_beta - m.precision) <= 1e-2);
  }
}

TEST_CASE("hard confusion counts") {
  const std::vector<Label> pos(5, Label::positive), neg(5, Label::negative);
  const auto all = confusion_from_predictions(pos, pos);
  CHECK(all.tp == 5);
  CHECK(all.total() == 5);
  CHECK(confusion_from_predictions(pos, neg).fn == 5);
  const auto mixed = confusion_from_predictions({Label::positive, Label::negative, Label::positive, Label::negative},
                                                {Label::positive, Label::positive, Label::negative, Label::negative});
  CHECK(mixed.tp == 1);
  CHECK(mixed.fp == 1);
  CHECK(mixed.fn == 1);
  CHECK(mixed.tn == 1);
  try {
    confusion_from_predictions(pos, {Label::positive});
    FAIL("expected length_mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::length_mismatch);
  }
}

TEST_CASE("smoothed counts") {
  const auto g = GridSpec(Eigen::VectorXd::Constant(1, -6.0), Eigen::VectorXd::Constant(1, 10.0), {1600});
  const auto d = oracle::toy_pair(g);
  const double eps = 0.01;

  SUBCASE("u = +1 is all positive") {
    const auto c = smoothed_confusion(ScalarField::constant(g, 1.0), d, eps);
    CHECK(c.tp == doctest::Approx(1000 * heaviside(1.0, eps)));
    CHECK(c.fp == doctest::Approx(50000 * heaviside(1.0, eps)));
    CHECK(c.fn <= 1000 * heaviside(-1.0, eps) + 1e-9);
  }
  SUBCASE("u = -1 is all negative") {
    const auto c = smoothed_confusion(ScalarField::constant(g, -1.0), d, eps);
    CHECK(c.fn == doctest::Approx(1000.0));
    CHECK(c.tn == doctest::Approx(50000.0));
  }
  SUBCASE("partition identity for arbitrary u") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N(0, 0.3);
    ScalarField u(g);
    for (Index i = 0; i < g.size(); ++i) u[i] = N(rng);
    const auto c = smoothed_confusion(u, d, 0.05);
    CHECK(std::abs(c.tp + c.fn - 1000) <= 1e-9);
    CHECK(std::abs(c.fp + c.tn - 50000) <= 1e-9);
  }
  SUBCASE("Bayes threshold maximises accuracy") {
    const double tau = oracle::toy_bayes_threshold();
    CHECK(tau == doctest::Approx(3.956).epsilon(1e-3));
    const auto u = ScalarField::sample(g, [&](const Eigen::VectorXd& x) { return x[0] - tau; });
    const auto c = smoothed_confusion(u, d, eps);
    const double best = oracle::accuracy(oracle::toy_counts(
        oracle::argmax([](double t) { return oracle::accuracy(oracle::toy_counts(t)); }, 0, 8)));
    CHECK(std::abs((c.tp + c.tn) / c.total() - best) < 1e-4);
  }
  SUBCASE("smoothed and hard accuracy agree for a sharp front") {
    const auto data = gen_toy1d(8);
    const double tau = 3.5;
    std::vector<Label> pred;
    for (Index i = 0; i < data.size(); ++i)
      pred.push_back(data.points()(i, 0) >= tau ? Label::positive : Label::negative);
    const double hard = metrics_from_counts(confusion_from_predictions(data.labels(), pred), 1).accuracy;
    const auto u = ScalarField::sample(g, [&](const Eigen::VectorXd& x) { return x[0] - tau; });
    const auto soft = metrics_from_counts(smoothed_confusion(u, d, 0.1), 1).accuracy;
    CHECK(std::abs(hard - soft) <= 0.01);
  }
  SUBCASE("grid mismatch") {
    const auto other = GridSpec(Eigen::VectorXd::Constant(1, -6.0), Eigen::VectorXd::Constant(1, 10.0), {800});
    CHECK_THROWS_AS(smoothed_confusion(ScalarField(other), d, eps), Error);
  }
}

TEST_CASE("csv row") {
  const auto m = metrics_from_counts({50, 0, 50, 0}, 1);
  CHECK(metrics_csv_header() == "beta,f_beta,accuracy,recall,precision,epsilon");
  CHECK(to_csv_row(m) == "1,66.67,50.00,50.00,100.00,1");
}
