#include "ofc/density.hpp"

#include <cmath>
#include <numbers>

namespace ofc {

namespace {

constexpr Index chunk_rows = 4096;

// K(s, i) = φ((x_i - sample_s) / h) / h for the nodes x_i of one axis.
Eigen::MatrixXd axis_kernel(const Eigen::Ref<const Eigen::VectorXd>& coords, const GridSpec& grid, int axis,
                            double h) {
  Eigen::RowVectorXd nodes(grid.nodes(axis));
  for (Index i = 0; i < nodes.size(); ++i) nodes[i] = grid.coordinate(axis, i);
  const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
  Eigen::MatrixXd z = (nodes.replicate(coords.size(), 1).colwise() - coords) / h;
  return (z.array().square() * -0.5).exp().matrix() * norm;
}

}  // namespace

double KdeModel::operator()(const Eigen::VectorXd& x) const {
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * dim()) / bandwidth.prod();
  const Eigen::ArrayXd q =
      ((samples.rowwise() - x.transpose()).array().rowwise() / bandwidth.transpose().array()).square().rowwise().sum();
  return norm * (q * -0.5).exp().sum() / static_cast<double>(samples.rows());
}

Eigen::VectorXd scott_bandwidth(const Eigen::MatrixXd& samples) {
  const auto m = static_cast<double>(samples.rows());
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::VectorXd sd =
      ((samples.rowwise() - mean).array().square().colwise().sum() / (m - 1.0)).sqrt().transpose();
  return sd * std::pow(m, -1.0 / (samples.cols() + 4.0));
}

KdeModel fit_kde(Eigen::MatrixXd samples, const BandwidthRule& rule) {
  if (samples.rows() < 2) throw Error(ErrorCode::invalid_argument, "kde: needs at least 2 samples");
  if (!samples.allFinite()) throw Error(ErrorCode::invalid_argument, "kde: non-finite sample");
  Eigen::VectorXd bw;
  if (rule.fixed) {
    bw = rule.fixed->size() == 1 ? Eigen::VectorXd::Constant(samples.cols(), (*rule.fixed)[0]) : *rule.fixed;
    if (bw.size() != samples.cols()) throw Error(ErrorCode::invalid_argument, "kde: bandwidth dimension mismatch");
    if (!(bw.array() > 0).all() || !bw.allFinite())
      throw Error(ErrorCode::invalid_argument, "kde: bandwidths must be positive");
  } else {
    bw = scott_bandwidth(samples);
    for (Index a = 0; a < bw.size(); ++a)
      if (!(bw[a] > 0))
        throw Error(ErrorCode::degenerate_data,
                    "kde: feature " + std::to_string(a) + " has zero variance and no explicit bandwidth");
  }
  return {std::move(samples), std::move(bw)};
}

ScalarField density_on_grid(const KdeModel& model, const GridSpec& grid) {
  const int d = grid.dim();
  if (d != model.dim()) throw Error(ErrorCode::invalid_argument, "density_on_grid: dimension mismatch");
  const Index m = model.samples.rows();
  const Index n_last = grid.nodes(d - 1);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.size());

  for (Index start = 0; start < m; start += chunk_rows) {
    const Index rows = std::min(chunk_rows, m - start);
    std::vector<Eigen::MatrixXd> k(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
      k[static_cast<std::size_t>(a)] =
          axis_kernel(model.samples.col(a).segment(start, rows), grid, a, model.bandwidth[a]);

    if (d == 1) {
      acc += k[0].colwise().sum().transpose();
      continue;
    }
    // Sum over samples of the outer product of the per-axis kernels; the
    // last two axes form a GEMM, leading axes are enumerated.
    const auto& ka = k[static_cast<std::size_t>(d - 2)];
    const auto& kb = k[static_cast<std::size_t>(d - 1)];
    const Index n_pen = grid.nodes(d - 2);
    const Index outer = grid.size() / (n_pen * n_last);
    Eigen::VectorXd w(rows);
    for (Index o = 0; o < outer; ++o) {
      w.setOnes();
      Index rem = o;
      for (int a = d - 3; a >= 0; --a) {
        const Index i = rem % grid.nodes(a);
        rem /= grid.nodes(a);
        w.array() *= k[static_cast<std::size_t>(a)].col(i).array();
      }
      Eigen::MatrixXd block = (ka.array().colwise() * w.array()).matrix().transpose() * kb;
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dst(
          acc.data() + o * n_pen * n_last, n_pen, n_last);
      dst += block;
    }
  }
  acc /= static_cast<double>(m);

  ScalarField f(grid, std::move(acc));
  const double total = integrate(f);
  if (!(total >= 1e-12))
    throw Error(ErrorCode::empty_mass, "density_on_grid: grid misses the sample mass (integral " + std::to_string(total) + ")");
  f.values() /= total;
  return f;
}

DensityPair estimate_pair(const LabeledDataset& data, const GridSpec& grid, const BandwidthRule& rule) {
  auto one = [&](Label label, const char* tag) {
    try {
      if ((label == Label::positive ? data.p_count() : data.n_count()) < 2)
        throw Error(ErrorCode::insufficient_class_samples, "needs at least 2 samples");
      return density_on_grid(fit_kde(data.class_points(label), rule), grid);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(tag) + " class: " + e.what());
    }
  };
  DensityPair pair{one(Label::positive, "positive"), one(Label::negative, "negative"), data.p_count(), data.n_count()};
  return pair;
}

}  // namespace ofc
