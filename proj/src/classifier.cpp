#include "ofc/classifier.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ofc/field_io.hpp"
#include "ofc/format.hpp"

namespace ofc {

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void bytes(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  }
  void real(double v) { bytes(std::bit_cast<std::uint64_t>(v)); }
  void values(const ScalarField& f) {
    bytes(static_cast<std::uint64_t>(f.size()));
    for (Index i = 0; i < f.size(); ++i) real(f[i]);
  }
};

bool positive(double v) { return v >= 0; }

}  // namespace

bool TrainedClassifier::degenerate() const {
  const auto& v = u.values();
  if (v.size() == 0) return true;
  const bool first = positive(v[0]);
  for (Index i = 1; i < v.size(); ++i)
    if (positive(v[i]) != first) return false;
  return true;
}

std::uint64_t TrainedClassifier::fingerprint() const {
  Fnv1a f;
  f.values(u);
  f.bytes(static_cast<std::uint64_t>(measure.kind));
  f.real(measure.beta);
  f.real(measure.k);
  f.bytes(densities_hash);
  return f.h;
}

std::uint64_t densities_hash(const DensityPair& d) {
  Fnv1a f;
  f.values(d.f_pos);
  f.values(d.f_neg);
  f.bytes(static_cast<std::uint64_t>(d.p_count));
  f.bytes(static_cast<std::uint64_t>(d.n_count));
  return f.h;
}

FitResult fit_densities(const DensityPair& densities, const TrainConfig& cfg) {
  const MeasureEnergy e =
      cfg.measure == MeasureKind::f_measure ? MeasureEnergy::f_measure(cfg.beta, densities) : MeasureEnergy::accuracy();
  TrainResult r = train(densities, e, cfg);
  TrainedClassifier m{std::move(r.u), e, cfg, densities_hash(densities)};
  return {std::move(m), std::move(r.trace)};
}

FitResult fit(const LabeledDataset& data, const TrainConfig& cfg, const BandwidthRule& bandwidth) {
  if (data.size() == 0) throw Error(ErrorCode::degenerate_data, "fit: empty dataset");
  TrainConfig c = cfg;
  if (c.resolution.empty()) c.resolution = default_resolution(data.dim());
  if (static_cast<int>(c.resolution.size()) != data.dim())
    throw Error(ErrorCode::invalid_argument, "fit: resolution has " + std::to_string(c.resolution.size()) +
                                                 " axes, data has " + std::to_string(data.dim()));
  const GridSpec grid = bounding_grid(data.points(), c.resolution, 0.1);
  const DensityPair d = estimate_pair(data, grid, bandwidth);
  return fit_densities(d, c);
}

Prediction predict(const TrainedClassifier& m, const Eigen::VectorXd& x) {
  const auto r = interpolate(m.u, x, OutOfBounds::clamp);
  return {positive(r.value) ? Label::positive : Label::negative, r.clamped};
}

std::vector<Prediction> predict_all(const TrainedClassifier& m, const Eigen::MatrixXd& points) {
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) out.push_back(predict(m, points.row(i).transpose()));
  return out;
}

std::vector<Label> labels_of(const std::vector<Prediction>& p) {
  std::vector<Label> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [](const Prediction& q) { return q.label; });
  return out;
}

ConfusionCounts confusion(const TrainedClassifier& m, const LabeledDataset& data) {
  return confusion_from_predictions(data.labels(), labels_of(predict_all(m, data.points())));
}

// Frontier --------------------------------------------------------------------

namespace {

Eigen::VectorXd edge_point(const GridSpec& g, const ScalarField& u, Index i, int axis) {
  const Index j = i + g.stride(axis);
  const double t = u[i] / (u[i] - u[j]);
  Eigen::VectorXd p = g.node(i);
  p[axis] += t * g.spacing(axis);
  return p;
}

bool crosses(const GridSpec& g, const ScalarField& u, Index i, int axis) {
  if (g.index_along(i, axis) == g.cells(axis)) return false;
  return positive(u[i]) != positive(u[i + g.stride(axis)]);
}

std::vector<Polyline> marching_squares(const ScalarField& u) {
  const auto& g = u.grid();
  const Index sx = g.stride(0), sy = g.stride(1);
  auto edge_id = [](Index node, int axis) { return 2 * node + axis; };

  std::vector<std::pair<Index, Index>> segments;
  for (Index i = 0; i < g.cells(0); ++i) {
    for (Index j = 0; j < g.cells(1); ++j) {
      const Index c0 = i * sx + j * sy, c1 = c0 + sx, c2 = c1 + sy, c3 = c0 + sy;
      // Edges in order around the cell: c0-c1, c1-c2, c3-c2, c0-c3.
      const Index e[4] = {edge_id(c0, 0), edge_id(c1, 1), edge_id(c3, 0), edge_id(c0, 1)};
      const bool s[4] = {positive(u[c0]), positive(u[c1]), positive(u[c2]), positive(u[c3])};
      const bool cut[4] = {s[0] != s[1], s[1] != s[2], s[3] != s[2], s[0] != s[3]};
      const int n = cut[0] + cut[1] + cut[2] + cut[3];
      if (n == 2) {
        Index ends[2];
        int k = 0;
        for (int q = 0; q < 4; ++q)
          if (cut[q]) ends[k++] = e[q];
        segments.emplace_back(ends[0], ends[1]);
      } else if (n == 4) {
        const double centre = 0.25 * (u[c0] + u[c1] + u[c2] + u[c3]);
        if (positive(centre) == s[0]) {
          segments.emplace_back(e[0], e[1]);
          segments.emplace_back(e[2], e[3]);
        } else {
          segments.emplace_back(e[3], e[0]);
          segments.emplace_back(e[1], e[2]);
        }
      }
    }
  }

  std::map<Index, std::vector<std::size_t>> at_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    at_edge[segments[s].first].push_back(s);
    at_edge[segments[s].second].push_back(s);
  }
  std::vector<char> used(segments.size(), 0);
  auto next_from = [&](Index edge, std::size_t from) -> std::optional<std::size_t> {
    for (std::size_t s : at_edge[edge])
      if (s != from && !used[s]) return s;
    return std::nullopt;
  };
  auto other_end = [&](std::size_t s, Index edge) {
    return segments[s].first == edge ? segments[s].second : segments[s].first;
  };
  auto walk = [&](std::size_t start, Index edge, std::vector<Index>& chain) {
    std::size_t cur = start;
    while (auto s = next_from(edge, cur)) {
      used[*s] = 1;
      edge = other_end(*s, edge);
      chain.push_back(edge);
      cur = *s;
    }
  };

  std::vector<Polyline> lines;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    used[s] = 1;
    std::vector<Index> forward{segments[s].first, segments[s].second};
    walk(s, segments[s].second, forward);
    if (forward.back() != forward.front()) {
      std::vector<Index> backward;
      walk(s, segments[s].first, backward);
      forward.insert(forward.begin(), backward.rbegin(), backward.rend());
    }
    Polyline line;
    line.reserve(forward.size());
    for (Index id : forward) line.push_back(edge_point(g, u, id / 2, static_cast<int>(id % 2)));
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

Frontier frontier(const ScalarField& u) {
  const auto& g = u.grid();
  {
    bool pos = false, neg = false;
    for (Index i = 0; i < u.size(); ++i) (positive(u[i]) ? pos : neg) = true;
    if (!(pos && neg)) throw Error(ErrorCode::degenerate_model, "frontier: decision field has a single sign");
  }
  Frontier f;
  f.dim = g.dim();
  if (f.dim == 1) {
    for (Index i = 0; i < g.cells(0); ++i)
      if (crosses(g, u, i, 0)) f.thresholds.push_back(edge_point(g, u, i, 0)[0]);
  } else if (f.dim == 2) {
    f.polylines = marching_squares(u);
  } else {
    for (Index i = 0; i < g.size(); ++i)
      for (int a = 0; a < g.dim(); ++a)
        if (crosses(g, u, i, a)) {
          Eigen::VectorXd p = g.node(i);
          p[a] += 0.5 * g.spacing(a);
          f.points.push_back(std::move(p));
        }
  }
  return f;
}

Frontier frontier(const TrainedClassifier& m) { return frontier(m.u); }

void write_frontier_csv(std::ostream& os, const Frontier& f) {
  for (int a = 0; a < f.dim; ++a) os << (a ? ",x" : "x") << a;
  os << '\n';
  auto row = [&](const Eigen::VectorXd& p) {
    for (Index a = 0; a < p.size(); ++a) os << (a ? "," : "") << to_text(p[a]);
    os << '\n';
  };
  for (double t : f.thresholds) os << to_text(t) << '\n';
  for (std::size_t k = 0; k < f.polylines.size(); ++k) {
    if (k) os << '\n';
    for (const auto& p : f.polylines[k]) row(p);
  }
  for (const auto& p : f.points) row(p);
}

void save_frontier_csv(const std::string& path, const Frontier& f) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io_failure, "cannot write " + path);
  write_frontier_csv(os, f);
}

// Config text -------------------------------------------------------------------

namespace {

std::string optional_text(const std::optional<double>& v) { return v ? to_text(*v) : "auto"; }

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += " " + to_text(v[i]);
  return s;
}

std::string init_text(const InitShape<double>& s) {
  if (auto* l = std::get_if<Lattice<double>>(&s))
    return "lattice " + std::to_string(l->cells_per_axis) + " " + to_text(l->radius_fraction) + " " +
           to_text(l->offset);
  if (auto* sp = std::get_if<Sphere<double>>(&s)) return "sphere " + to_text(sp->radius) + join(sp->center);
  const auto& b = std::get<Box<double>>(s);
  return "box" + join(b.lower) + join(b.upper);
}

std::vector<double> numbers(const std::string& key, std::istringstream& in) {
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    auto v = parse_double(tok);
    if (!v || !std::isfinite(*v)) throw Error(ErrorCode::parse_error, key + ": bad number '" + tok + "'");
    out.push_back(*v);
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v, std::size_t from, std::size_t count) {
  Eigen::VectorXd out(static_cast<Index>(count));
  for (std::size_t i = 0; i < count; ++i) out[static_cast<Index>(i)] = v[from + i];
  return out;
}

InitShape<double> parse_init(const std::string& value) {
  std::istringstream in(value);
  std::string kind;
  in >> kind;
  auto v = numbers("init", in);
  auto bad = [&] { return Error(ErrorCode::parse_error, "init: cannot parse '" + value + "'"); };
  if (kind == "lattice") {
    Lattice<double> l;
    if (v.size() > 3) throw bad();
    if (v.size() > 0) {
      if (v[0] != std::floor(v[0]) || v[0] < 1) throw bad();
      l.cells_per_axis = static_cast<int>(v[0]);
    }
    if (v.size() > 1) l.radius_fraction = v[1];
    if (v.size() > 2) l.offset = v[2];
    return l;
  }
  if (kind == "sphere") {
    if (v.size() < 2) throw bad();
    return Sphere<double>{to_vector(v, 1, v.size() - 1), v[0]};
  }
  if (kind == "box") {
    if (v.size() < 2 || v.size() % 2) throw bad();
    const std::size_t d = v.size() / 2;
    return Box<double>{to_vector(v, 0, d), to_vector(v, d, d)};
  }
  throw bad();
}

double parse_real(const std::string& key, const std::string& value) {
  auto v = parse_double(trim(value));
  if (!v || !std::isfinite(*v)) throw Error(ErrorCode::parse_error, key + ": bad number '" + value + "'");
  return *v;
}

long long parse_int(const std::string& key, const std::string& value) {
  auto v = parse_integer(trim(value));
  if (!v) throw Error(ErrorCode::parse_error, key + ": bad integer '" + value + "'");
  return *v;
}

std::optional<double> parse_optional(const std::string& key, const std::string& value) {
  if (trim(value) == "auto") return std::nullopt;
  return parse_real(key, value);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& cfg) {
  std::string res = "auto";
  if (!cfg.resolution.empty()) {
    res.clear();
    for (std::size_t a = 0; a < cfg.resolution.size(); ++a)
      res += (a ? " " : "") + std::to_string(cfg.resolution[a]);
  }
  return {
      {"measure", to_string(cfg.measure)},
      {"beta", to_text(cfg.beta)},
      {"dt", optional_text(cfg.dt)},
      {"lambda", optional_text(cfg.lambda)},
      {"eps_h", optional_text(cfg.eps_h)},
      {"tol", to_text(cfg.tol)},
      {"reinit_every", std::to_string(cfg.reinit_every)},
      {"max_iter", std::to_string(cfg.max_iter)},
      {"resolution", res},
      {"init", init_text(cfg.init)},
      {"seed", std::to_string(cfg.seed)},
      {"descent", to_string(cfg.descent)},
  };
}

bool parse_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "measure") {
      cfg.measure = parse_measure_kind(std::string(trim(value)));
    } else if (key == "beta") {
      cfg.beta = parse_real(key, value);
    } else if (key == "dt") {
      cfg.dt = parse_optional(key, value);
    } else if (key == "lambda") {
      cfg.lambda = parse_optional(key, value);
    } else if (key == "eps_h") {
      cfg.eps_h = parse_optional(key, value);
    } else if (key == "tol") {
      cfg.tol = parse_real(key, value);
    } else if (key == "reinit_every") {
      cfg.reinit_every = static_cast<int>(parse_int(key, value));
    } else if (key == "max_iter") {
      cfg.max_iter = static_cast<int>(parse_int(key, value));
    } else if (key == "resolution") {
      cfg.resolution.clear();
      if (trim(value) != "auto") {
        std::istringstream in(value);
        for (double c : numbers(key, in)) {
          if (c != std::floor(c) || c < 1) throw Error(ErrorCode::parse_error, "resolution: bad cell count");
          cfg.resolution.push_back(static_cast<Index>(c));
        }
      }
    } else if (key == "init") {
      cfg.init = parse_init(std::string(trim(value)));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "descent") {
      cfg.descent = parse_descent(std::string(trim(value)));
    } else {
      return false;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse_error) throw;
    throw Error(ErrorCode::parse_error, key + ": " + e.what());
  }
  return true;
}

// Model files -------------------------------------------------------------------

namespace {
constexpr const char* model_magic = "ofc-model";
}

void write_model(std::ostream& os, const TrainedClassifier& m) {
  os << model_magic << " version=" << model_format_version << '\n';
  os << "measure.kind=" << to_string(m.measure.kind) << '\n';
  os << "measure.beta=" << to_text(m.measure.beta) << '\n';
  os << "measure.k=" << to_text(m.measure.k) << '\n';
  os << "densities_hash=" << m.densities_hash << '\n';
  for (const auto& [k, v] : config_entries(m.config)) os << "config." << k << '=' << v << '\n';
  os << "field\n";
  write_field(os, m.u);
}

TrainedClassifier read_model(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::parse_error, "model: empty file");
  const std::string prefix = std::string(model_magic) + " version=";
  if (line.rfind(prefix, 0) != 0) throw Error(ErrorCode::parse_error, "model: not a model file");
  const auto version = parse_integer(line.substr(prefix.size()));
  if (!version) throw Error(ErrorCode::parse_error, "model: bad version tag");
  if (*version != model_format_version)
    throw Error(ErrorCode::format_version_mismatch, "model: file version " + std::to_string(*version) +
                                                        ", this build reads version " +
                                                        std::to_string(model_format_version));

  TrainedClassifier m;
  bool have_kind = false, have_beta = false, have_k = false, have_hash = false, have_field = false;
  while (std::getline(is, line)) {
    if (line == "field") {
      have_field = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::parse_error, "model: bad preamble line '" + line + "'");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "measure.kind") {
      m.measure.kind = parse_measure_kind(value);
      have_kind = true;
    } else if (key == "measure.beta") {
      m.measure.beta = parse_real(key, value);
      have_beta = true;
    } else if (key == "measure.k") {
      m.measure.k = parse_real(key, value);
      have_k = true;
    } else if (key == "densities_hash") {
      std::uint64_t h = 0;
      const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), h);
      if (ec != std::errc() || end != value.data() + value.size())
        throw Error(ErrorCode::parse_error, "model: bad densities_hash");
      m.densities_hash = h;
      have_hash = true;
    } else if (key.rfind("config.", 0) == 0) {
      if (!parse_config_entry(m.config, key.substr(7), value))
        throw Error(ErrorCode::parse_error, "model: unknown key '" + key + "'");
    } else {
      throw Error(ErrorCode::parse_error, "model: unknown key '" + key + "'");
    }
  }
  if (!have_field) throw Error(ErrorCode::parse_error, "model: truncated before field data");
  if (!(have_kind && have_beta && have_k && have_hash)) throw Error(ErrorCode::parse_error, "model: missing preamble keys");
  m.u = read_field(is);
  return m;
}

void save_model(const std::string& path, const TrainedClassifier& m) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io_failure, "cannot write " + path);
  write_model(os, m);
  if (!os) throw Error(ErrorCode::io_failure, "write failed for " + path);
}

TrainedClassifier load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_failure, "cannot read " + path);
  return read_model(is);
}

}  // namespace ofc
