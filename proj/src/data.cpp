#include "ofc/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ofc/format.hpp"

namespace ofc {

LabeledDataset::LabeledDataset(Eigen::MatrixXd points, std::vector<Label> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (static_cast<Index>(labels_.size()) != points_.rows())
    throw Error(ErrorCode::length_mismatch, "dataset: point and label counts differ");
  if (!points_.allFinite()) throw Error(ErrorCode::invalid_argument, "dataset: non-finite coordinate");
  for (Label l : labels_)
    if (l == Label::positive) ++p_count_;
}

Eigen::MatrixXd LabeledDataset::class_points(Label label) const {
  const Index n = label == Label::positive ? p_count() : n_count();
  Eigen::MatrixXd out(n, points_.cols());
  Index r = 0;
  for (Index i = 0; i < size(); ++i)
    if (labels_[static_cast<std::size_t>(i)] == label) out.row(r++) = points_.row(i);
  return out;
}

LabeledDataset LabeledDataset::subset(const std::vector<Index>& rows) const {
  Eigen::MatrixXd p(static_cast<Index>(rows.size()), points_.cols());
  std::vector<Label> l(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    p.row(static_cast<Index>(r)) = points_.row(rows[r]);
    l[r] = labels_[static_cast<std::size_t>(rows[r])];
  }
  return LabeledDataset(std::move(p), std::move(l));
}

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  return r * std::cos(t);
}

Index Rng::below(Index n) {
  if (n <= 0) throw Error(ErrorCode::invalid_argument, "Rng::below needs n > 0");
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % un;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<Index>(x % un);
}

LabeledDataset gen_toy1d(std::uint64_t seed, const Toy1dSpec& spec) {
  Rng rng(seed);
  const Index n = spec.p_count + spec.n_count;
  Eigen::MatrixXd x(n, 1);
  std::vector<Label> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const bool pos = i < spec.p_count;
    x(i, 0) = rng.normal(pos ? spec.positive_mean : spec.negative_mean, spec.sd);
    labels[static_cast<std::size_t>(i)] = pos ? Label::positive : Label::negative;
  }
  return LabeledDataset(std::move(x), std::move(labels));
}

namespace {

using Sampler = Eigen::Vector2d (*)(Rng&);

Eigen::Vector2d gaussian_blob(Rng& rng) {
  return {rng.normal(0.0, db::negative_sd), rng.normal(0.0, db::negative_sd)};
}

Eigen::Vector2d ring(Rng& rng) {
  const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double r = rng.normal(db::ring_radius, db::ring_noise);
  return {r * std::cos(t), r * std::sin(t)};
}

Eigen::Vector2d horseshoe(Rng& rng) {
  const double t = rng.uniform(0.0, std::numbers::pi);
  const double r = rng.normal(db::horseshoe_radius, db::horseshoe_thickness);
  return {r * std::cos(t), r * std::sin(t)};
}

// Alternating sites of the lattice {-4, 0, 4} x {-2, 2}.
Eigen::Vector2d positive_modes(Rng& rng) {
  static const double sites[3][2] = {{-4, -2}, {0, 2}, {4, -2}};
  const auto* s = sites[rng.below(3)];
  return {rng.normal(s[0], db::mode_sd), rng.normal(s[1], db::mode_sd)};
}

Eigen::Vector2d negative_modes(Rng& rng) {
  static const double sites[3][2] = {{-4, 2}, {0, -2}, {4, 2}};
  const auto* s = sites[rng.below(3)];
  return {rng.normal(s[0], db::mode_sd), rng.normal(s[1], db::mode_sd)};
}

LabeledDataset two_class(Rng& rng, Index p, Index n, Sampler pos, Sampler neg) {
  Eigen::MatrixXd x(p + n, 2);
  std::vector<Label> labels(static_cast<std::size_t>(p + n));
  for (Index i = 0; i < p + n; ++i) {
    const bool is_pos = i < p;
    x.row(i) = (is_pos ? pos(rng) : neg(rng)).transpose();
    labels[static_cast<std::size_t>(i)] = is_pos ? Label::positive : Label::negative;
  }
  return LabeledDataset(std::move(x), std::move(labels));
}

}  // namespace

LabeledDataset gen_db(int which, std::uint64_t seed) {
  Rng rng(seed);
  switch (which) {
    case 1: return two_class(rng, 5000, 5000, ring, gaussian_blob);
    case 2: return two_class(rng, 1000, 10000, positive_modes, negative_modes);
    case 3: return two_class(rng, 1000, 10000, horseshoe, gaussian_blob);
    case 4: return two_class(rng, 1000, 10000, ring, gaussian_blob);
    default: throw Error(ErrorCode::invalid_database, "database id must be 1..4, got " + std::to_string(which));
  }
}

namespace {

bool label_matches(std::string_view field, const std::string& positive) {
  if (field == positive) return true;
  auto a = parse_double(field), b = parse_double(positive);
  return a && b && *a == *b;
}

}  // namespace

namespace {

// A first row with no numeric field is a column header.
bool row_is_header(const std::vector<std::string_view>& fields, bool first_row) {
  if (!first_row) return false;
  for (auto f : fields)
    if (parse_double(f)) return false;
  return true;
}

}  // namespace

Eigen::MatrixXd load_points(const std::string& path, char separator) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_failure, "cannot read " + path);
  std::vector<double> values;
  long long width = -1, row = 0, rows = 0;
  std::string line;
  while (std::getline(is, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split(line, separator);
    if (row_is_header(fields, rows == 0 && width < 0)) {
      width = static_cast<long long>(fields.size());
      continue;
    }
    const auto ncols = static_cast<long long>(fields.size());
    if (width < 0) width = ncols;
    if (ncols != width)
      throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + " has " + std::to_string(ncols) +
                                              " columns, expected " + std::to_string(width));
    for (long long c = 0; c < ncols; ++c) {
      auto v = parse_double(fields[static_cast<std::size_t>(c)]);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                                                ": non-numeric value '" +
                                                std::string(trim(fields[static_cast<std::size_t>(c)])) + "'");
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::parse_error, path + ": empty-input");
  return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), rows, width);
}

LabeledDataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_failure, "cannot read " + path);
  std::vector<double> values;
  std::vector<Label> labels;
  long long width = -1;
  std::string line;
  long long row = 0;
  bool skipped_header = !options.has_header;
  while (std::getline(is, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split(line, options.separator);
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    if (row_is_header(fields, labels.empty())) continue;
    const auto ncols = static_cast<long long>(fields.size());
    if (ncols < 2) throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + " has fewer than 2 columns");
    if (width < 0) width = ncols;
    if (ncols != width)
      throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + " has " + std::to_string(ncols) +
                                              " columns, expected " + std::to_string(width));
    const long long lc = options.label_column < 0 ? ncols + options.label_column : options.label_column;
    if (lc < 0 || lc >= ncols) throw Error(ErrorCode::invalid_argument, "label column out of range");
    for (long long c = 0; c < ncols; ++c) {
      if (c == lc) continue;
      auto v = parse_double(fields[static_cast<std::size_t>(c)]);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                                                ": non-numeric feature '" +
                                                std::string(trim(fields[static_cast<std::size_t>(c)])) + "'");
      values.push_back(*v);
    }
    labels.push_back(label_matches(trim(fields[static_cast<std::size_t>(lc)]), options.positive_value) ? Label::positive
                                                                                                       : Label::negative);
  }
  if (labels.empty()) throw Error(ErrorCode::parse_error, path + ": empty-input");
  const Index d = width - 1;
  Eigen::MatrixXd pts = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Index>(labels.size()), d);
  return LabeledDataset(std::move(pts), std::move(labels));
}

void save_csv(const std::string& path, const LabeledDataset& data, bool header) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io_failure, "cannot write " + path);
  if (header) {
    for (int a = 0; a < data.dim(); ++a) os << 'x' << a << ',';
    os << "label\n";
  }
  for (Index i = 0; i < data.size(); ++i) {
    for (int a = 0; a < data.dim(); ++a) os << to_text(data.points()(i, a)) << ',';
    os << (data.labels()[static_cast<std::size_t>(i)] == Label::positive ? 1 : 0) << '\n';
  }
  if (!os) throw Error(ErrorCode::io_failure, "write failed: " + path);
}

LabeledDataset load_skin(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_failure, "cannot read " + path);
  std::vector<double> values;
  std::vector<Label> labels;
  std::string line;
  long long row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string tok[5];
    int n = 0;
    while (n < 5 && ss >> tok[n]) ++n;
    if (n != 4) throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + " must have 4 fields");
    for (int c = 0; c < 3; ++c) {
      auto v = parse_integer(tok[c]);
      if (!v || *v < 0 || *v > 255)
        throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + ": bad colour value '" + tok[c] + "'");
      values.push_back(static_cast<double>(*v));
    }
    auto lab = parse_integer(tok[3]);
    if (!lab || (*lab != 1 && *lab != 2))
      throw Error(ErrorCode::parse_error, path + ": row " + std::to_string(row) + ": label must be 1 or 2, got '" + tok[3] + "'");
    labels.push_back(*lab == 1 ? Label::positive : Label::negative);
  }
  if (labels.empty()) throw Error(ErrorCode::parse_error, path + ": empty-input");
  Eigen::MatrixXd pts = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>>(
      values.data(), static_cast<Index>(labels.size()), 3);
  return LabeledDataset(std::move(pts), std::move(labels));
}

std::optional<std::string> skin_count_warning(const LabeledDataset& data) {
  if (data.p_count() == skin_positive_count && data.n_count() == skin_negative_count) return std::nullopt;
  return "skin data has " + std::to_string(data.p_count()) + " skin / " + std::to_string(data.n_count()) +
         " non-skin samples; the canonical file has " + std::to_string(skin_positive_count) + " / " +
         std::to_string(skin_negative_count);
}

std::vector<Fold> kfold(const LabeledDataset& data, int k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "kfold: k must be at least 2");
  Rng rng(seed);
  std::vector<std::vector<Index>> groups;
  if (stratified) {
    groups.resize(2);
    for (Index i = 0; i < data.size(); ++i)
      groups[data.labels()[static_cast<std::size_t>(i)] == Label::positive ? 0 : 1].push_back(i);
    for (const auto& g : groups)
      if (static_cast<Index>(g.size()) < k)
        throw Error(ErrorCode::insufficient_class_samples,
                    "kfold: a class has " + std::to_string(g.size()) + " samples, fewer than k = " + std::to_string(k));
  } else {
    if (data.size() < k) throw Error(ErrorCode::insufficient_class_samples, "kfold: fewer samples than folds");
    groups.resize(1);
    for (Index i = 0; i < data.size(); ++i) groups[0].push_back(i);
  }

  std::vector<Fold> folds(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (auto& g : groups) {
    rng.shuffle(g);
    for (Index i : g) {
      folds[next].test.push_back(i);
      next = (next + 1) % folds.size();
    }
  }
  std::vector<int> owner(static_cast<std::size_t>(data.size()));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::sort(folds[f].test.begin(), folds[f].test.end());
    for (Index i : folds[f].test) owner[static_cast<std::size_t>(i)] = static_cast<int>(f);
  }
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (Index i = 0; i < data.size(); ++i)
      if (owner[static_cast<std::size_t>(i)] != static_cast<int>(f)) folds[f].train.push_back(i);
  return folds;
}

}  // namespace ofc
