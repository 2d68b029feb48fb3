#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "ofc/data.hpp"

using namespace ofc;
namespace fs = std::filesystem;

namespace {

// A file in the temp directory, removed when the test ends.
struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& content, const std::string& name) {
    path = fs::temp_directory_path() / ("ofc_test_" + name);
    std::ofstream(path, std::ios::binary) << content;
  }
  ~TempFile() { fs::remove(path); }
  std::string str() const { return path.string(); }
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::invalid_argument;
}

double class_mean(const LabeledDataset& d, Label l, int axis) { return d.class_points(l).col(axis).mean(); }

}  // namespace

TEST_CASE("toy generator") {
  const auto d = gen_toy1d(default_seed);
  CHECK(d.p_count() == 1000);
  CHECK(d.n_count() == 50000);
  CHECK(d.dim() == 1);
  CHECK(std::abs(class_mean(d, Label::positive, 0) - 3.0) <= 0.1);
  CHECK(std::abs(class_mean(d, Label::negative, 0) - 1.0) <= 0.02);
  const auto again = gen_toy1d(default_seed);
  CHECK(again.points() == d.points());
  CHECK(again.labels() == d.labels());
  CHECK(gen_toy1d(default_seed + 1).points() != d.points());
}

TEST_CASE("database generators") {
  const std::pair<Index, Index> counts[] = {{5000, 5000}, {1000, 10000}, {1000, 10000}, {1000, 10000}};
  for (int which = 1; which <= 4; ++which) {
    const auto d = gen_db(which, 5);
    CAPTURE(which);
    CHECK(d.dim() == 2);
    CHECK(d.p_count() == counts[which - 1].first);
    CHECK(d.n_count() == counts[which - 1].second);
    CHECK(gen_db(which, 5).points() == d.points());
  }
  const auto ring = gen_db(1, 5).class_points(Label::positive);
  CHECK(std::abs(ring.rowwise().norm().mean() - db::ring_radius) <= 0.05);
  // Negatives: isotropic Gaussian at the origin.
  const auto neg = gen_db(4, 5).class_points(Label::negative);
  CHECK(neg.colwise().mean().norm() < 0.05);
  CHECK(std::sqrt(neg.col(0).array().square().mean()) == doctest::Approx(db::negative_sd).epsilon(0.03));
  // Horseshoe positives sit above the centre of the negatives.
  const auto shoe = gen_db(3, 5).class_points(Label::positive);
  CHECK(shoe.col(1).mean() > 1.0);
  CHECK(code_of([] { gen_db(5, 1); }) == ErrorCode::invalid_database);
  CHECK(code_of([] { gen_db(0, 1); }) == ErrorCode::invalid_database);
}

TEST_CASE("random numbers") {
  Rng rng(12);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1) < 0.01);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[static_cast<std::size_t>(rng.below(7))];
  for (int h : hits) CHECK(std::abs(h - 10000) < 400);
}

TEST_CASE("csv loading") {
  SUBCASE("labels and counts") {
    TempFile f("0.5,1.5,1\n2,3,0\n-1,4e-1,1\n", "basic.csv");
    const auto d = load_csv(f.str());
    CHECK(d.p_count() == 2);
    CHECK(d.n_count() == 1);
    CHECK(d.points()(2, 1) == doctest::Approx(0.4));
  }
  SUBCASE("header row is skipped") {
    TempFile f("x0,x1,label\n1,2,1\n3,4,0\n", "header.csv");
    CHECK(load_csv(f.str()).size() == 2);
  }
  SUBCASE("label column and value") {
    TempFile f("yes;1;2\nno;3;4\nyes;5;6\n", "semi.csv");
    CsvOptions o;
    o.label_column = 0;
    o.positive_value = "yes";
    o.separator = ';';
    const auto d = load_csv(f.str(), o);
    CHECK(d.p_count() == 2);
    CHECK(d.points()(1, 0) == 3);
  }
  SUBCASE("bad feature names the row") {
    TempFile f("1,2,1\n3,abc,0\n", "bad.csv");
    try {
      load_csv(f.str());
      FAIL("expected parse_error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse_error);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SUBCASE("empty file") {
    TempFile f("", "empty.csv");
    try {
      load_csv(f.str());
      FAIL("expected parse_error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse_error);
      CHECK(std::string(e.what()).find("empty-input") != std::string::npos);
    }
  }
  SUBCASE("ragged rows") {
    TempFile f("1,2,1\n3,0\n", "ragged.csv");
    CHECK(code_of([&] { load_csv(f.str()); }) == ErrorCode::parse_error);
  }
  SUBCASE("missing file") { CHECK(code_of([] { load_csv("/nonexistent/x.csv"); }) == ErrorCode::io_failure); }
  SUBCASE("save then load") {
    const auto d = gen_db(2, 3);
    const auto path = (fs::temp_directory_path() / "ofc_test_roundtrip.csv").string();
    save_csv(path, d);
    const auto back = load_csv(path);
    fs::remove(path);
    CHECK(back.points() == d.points());
    CHECK(back.labels() == d.labels());
  }
  SUBCASE("points without labels") {
    TempFile f("a,b\n1,2\n3,4\n", "points.csv");
    const auto p = load_points(f.str());
    CHECK(p.rows() == 2);
    CHECK(p.cols() == 2);
    CHECK(p(1, 1) == 4);
  }
}

TEST_CASE("skin file") {
  SUBCASE("one line") {
    TempFile f("74\t85\t123\t1\n", "skin1.txt");
    const auto d = load_skin(f.str());
    REQUIRE(d.size() == 1);
    CHECK(d.p_count() == 1);
    CHECK(d.points().row(0) == Eigen::RowVector3d(74, 85, 123));
  }
  SUBCASE("labels map to classes and counts are checked") {
    TempFile f("0\t0\t0\t2\n255\t255\t255\t1\n10\t20\t30\t2\n", "skin2.txt");
    const auto d = load_skin(f.str());
    CHECK(d.p_count() == 1);
    CHECK(d.n_count() == 2);
    CHECK((d.points().array() >= 0).all());
    CHECK((d.points().array() <= 255).all());
    CHECK(skin_count_warning(d).has_value());
  }
  SUBCASE("label 3") {
    TempFile f("1\t2\t3\t3\n", "skin3.txt");
    CHECK(code_of([&] { load_skin(f.str()); }) == ErrorCode::parse_error);
  }
  SUBCASE("colour out of range") {
    TempFile f("1\t256\t3\t1\n", "skin4.txt");
    CHECK(code_of([&] { load_skin(f.str()); }) == ErrorCode::parse_error);
  }
}

TEST_CASE("k-fold partitions") {
  auto make = [](Index p, Index n) {
    Eigen::MatrixXd pts(p + n, 1);
    std::vector<Label> labels;
    for (Index i = 0; i < p + n; ++i) {
      pts(i, 0) = static_cast<double>(i);
      labels.push_back(i < p ? Label::positive : Label::negative);
    }
    return LabeledDataset(pts, labels);
  };
  SUBCASE("plain ten folds") {
    const auto folds = kfold(make(30, 70), 10, 1, false);
    REQUIRE(folds.size() == 10);
    std::set<Index> seen;
    for (const auto& f : folds) {
      CHECK(f.test.size() == 10);
      CHECK(f.train.size() == 90);
      seen.insert(f.test.begin(), f.test.end());
    }
    CHECK(seen.size() == 100);
  }
  SUBCASE("stratified keeps one positive per fold") {
    const auto d = make(10, 90);
    for (const auto& f : kfold(d, 10, 3)) {
      const auto pos = std::count_if(f.test.begin(), f.test.end(), [&](Index i) {
        return d.labels()[static_cast<std::size_t>(i)] == Label::positive;
      });
      CHECK(pos == 1);
    }
  }
  SUBCASE("too few positives") {
    CHECK(code_of([&] { kfold(make(5, 95), 10, 1); }) == ErrorCode::insufficient_class_samples);
  }
  SUBCASE("randomised sizes") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
      const int k = std::uniform_int_distribution<int>(2, 12)(rng);
      const Index p = std::uniform_int_distribution<Index>(k, 80)(rng);
      const Index n = std::uniform_int_distribution<Index>(k, 200)(rng);
      const auto d = make(p, n);
      const bool strat = trial % 2 == 0;
      const auto folds = kfold(d, k, static_cast<std::uint64_t>(trial), strat);
      REQUIRE(folds.size() == static_cast<std::size_t>(k));
      std::vector<int> hit(static_cast<std::size_t>(p + n), 0);
      Index min_pos = p, max_pos = 0, min_size = p + n, max_size = 0;
      for (const auto& f : folds) {
        for (Index i : f.test) ++hit[static_cast<std::size_t>(i)];
        CHECK(f.test.size() + f.train.size() == static_cast<std::size_t>(p + n));
        std::set<Index> train(f.train.begin(), f.train.end());
        for (Index i : f.test) CHECK(train.count(i) == 0);
        const Index pos = std::count_if(f.test.begin(), f.test.end(), [&](Index i) { return i < p; });
        min_pos = std::min(min_pos, pos);
        max_pos = std::max(max_pos, pos);
        min_size = std::min<Index>(min_size, static_cast<Index>(f.test.size()));
        max_size = std::max<Index>(max_size, static_cast<Index>(f.test.size()));
      }
      CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
      if (strat) CHECK(max_pos - min_pos <= 1);
      CHECK(max_size - min_size <= (strat ? 2 : 1));
    }
  }
  SUBCASE("seeded") {
    const auto d = make(20, 80);
    CHECK(kfold(d, 5, 9)[2].test == kfold(d, 5, 9)[2].test);
    CHECK(kfold(d, 5, 9)[2].test != kfold(d, 5, 10)[2].test);
  }
}
