#include "ofc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "ofc/format.hpp"

namespace ofc {

const char* to_string(Descent d) { return d == Descent::derivative ? "derivative" : "G"; }

Descent parse_descent(const std::string& s) {
  if (s == "derivative") return Descent::derivative;
  if (s == "G" || s == "g" || s == "literal") return Descent::literal;
  throw Error(ErrorCode::invalid_argument, "unknown descent '" + s + "'");
}

const char* to_string(TrainStatus s) { return s == TrainStatus::converged ? "converged" : "max-iter"; }

std::vector<Index> default_resolution(int dim) {
  const Index cells = dim == 1 ? 1024 : dim == 2 ? 128 : dim == 3 ? 64 : 16;
  return std::vector<Index>(static_cast<std::size_t>(dim), cells);
}

namespace {

constexpr int convergence_periods = 3;

double diffusion_dt_limit(const GridSpec& g, double lambda) {
  if (!(lambda > 0)) return std::numeric_limits<double>::infinity();
  double s = 0;
  for (int a = 0; a < g.dim(); ++a) s += 2.0 / (g.spacing(a) * g.spacing(a));
  return 0.5 / (lambda * s);
}

Eigen::VectorXd descent_direction(const MeasureEnergy& e, const ScalarField& u, const DensityPair& d,
                                  const StepParams& p, const EnergyEvaluation* ev) {
  Eigen::VectorXd dir;
  if (p.descent == Descent::literal)
    dir = literal_descent(e, u, d, p.eps_h).values();
  else
    dir = ev ? ev->gradient.values() : gradient(e, u, d, p.eps_h).values();
  if (p.lambda > 0) dir -= p.lambda * laplacian(u).values();
  return dir;
}

double auto_dt(const Eigen::VectorXd& dir, const GridSpec& g, double lambda) {
  const double peak = dir.cwiseAbs().maxCoeff();
  const double dt = peak > 0 ? 0.5 * g.max_spacing() / peak : std::numeric_limits<double>::infinity();
  return std::min(dt, diffusion_dt_limit(g, lambda));
}

}  // namespace

StepParams resolve_params(const TrainConfig& cfg, const GridSpec& grid) {
  const double h = grid.max_spacing();
  StepParams p;
  p.eps_h = cfg.eps_h.value_or(1.5 * h);
  p.lambda = cfg.lambda.value_or(0.1 * h * h);
  p.dt = cfg.dt.value_or(0.0);
  p.descent = cfg.descent;
  if (!(p.eps_h > 0)) throw Error(ErrorCode::invalid_argument, "eps_h must be positive");
  if (!(p.lambda >= 0)) throw Error(ErrorCode::invalid_argument, "lambda must be nonnegative");
  if (cfg.dt && !(*cfg.dt > 0)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
  for (int a = 0; a < grid.dim(); ++a)
    if (grid.cells(a) < 4) throw Error(ErrorCode::invalid_argument, "training grids need at least 4 cells per axis");
  return p;
}

ScalarField step(const ScalarField& u, const MeasureEnergy& e, const DensityPair& d, const StepParams& p) {
  if (!(p.dt > 0)) throw Error(ErrorCode::invalid_argument, "step: dt must be positive");
  const Eigen::VectorXd dir = descent_direction(e, u, d, p, nullptr);
  Eigen::VectorXd next = u.values() - p.dt * dir;
  const double moved = (next - u.values()).cwiseAbs().maxCoeff();
  if (!(moved <= 10 * u.grid().max_spacing()))
    throw Error(ErrorCode::step_rejected, "step moved u by " + to_text(moved) + ", more than 10 cell widths");
  return ScalarField(u.grid(), std::move(next));
}

// Reinitialisation -----------------------------------------------------------

namespace {

// Godunov update for |∇d| = 1 given the smallest neighbour value per axis.
double eikonal_update(std::vector<std::pair<double, double>>& nb) {
  // nb: (neighbour value, spacing), unsorted; infinite values are ignored.
  std::sort(nb.begin(), nb.end());
  double x = std::numeric_limits<double>::infinity();
  double sa = 0, sb = 0, sc = -1;  // Σ1/h², Σa/h², Σa²/h² - 1
  for (std::size_t m = 0; m < nb.size(); ++m) {
    const auto [a, h] = nb[m];
    if (!std::isfinite(a)) break;
    const double ih2 = 1.0 / (h * h);
    sa += ih2;
    sb += a * ih2;
    sc += a * a * ih2;
    const double disc = sb * sb - sa * sc;
    if (disc < 0) break;
    const double cand = (sb + std::sqrt(disc)) / sa;
    if (m + 1 < nb.size() && cand > nb[m + 1].first) {
      x = cand;
      continue;
    }
    return cand;
  }
  return x;
}

}  // namespace

Reinitialized reinitialize(const ScalarField& u) {
  const auto& g = u.grid();
  const int dim = g.dim();
  const Index n = g.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, inf);
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  bool any = false;

  for (Index i = 0; i < n; ++i) {
    const double ui = u[i];
    if (ui == 0) {
      dist[i] = 0;
      fixed[static_cast<std::size_t>(i)] = 1;
      any = true;
      continue;
    }
    double inv_sq = 0;
    for (int a = 0; a < dim; ++a) {
      const Index k = g.index_along(i, a);
      double da = inf;
      for (int side : {-1, 1}) {
        if ((side < 0 && k == 0) || (side > 0 && k == g.cells(a))) continue;
        const double uj = u[i + side * g.stride(a)];
        if (ui * uj < 0) da = std::min(da, ui / (ui - uj) * g.spacing(a));
      }
      if (std::isfinite(da)) inv_sq += 1.0 / (da * da);
    }
    if (inv_sq > 0) {
      dist[i] = 1.0 / std::sqrt(inv_sq);
      fixed[static_cast<std::size_t>(i)] = 1;
      any = true;
    }
  }
  if (!any) return {u, false};

  // Fast sweeping over all 2^dim axis orderings until nothing changes.
  std::vector<Index> idx(static_cast<std::size_t>(dim));
  std::vector<std::pair<double, double>> nb(static_cast<std::size_t>(dim));
  const int orderings = 1 << dim;
  for (int cycle = 0; cycle < 64; ++cycle) {
    double change = 0;
    for (int dir = 0; dir < orderings; ++dir) {
      for (Index c = 0; c < n; ++c) {
        Index flat = 0;
        for (int a = 0; a < dim; ++a) {
          const Index digit = g.index_along(c, a);
          const Index k = (dir >> a) & 1 ? g.cells(a) - digit : digit;
          idx[static_cast<std::size_t>(a)] = k;
          flat += k * g.stride(a);
        }
        if (fixed[static_cast<std::size_t>(flat)]) continue;
        for (int a = 0; a < dim; ++a) {
          const Index k = idx[static_cast<std::size_t>(a)];
          double m = inf;
          if (k > 0) m = std::min(m, dist[flat - g.stride(a)]);
          if (k < g.cells(a)) m = std::min(m, dist[flat + g.stride(a)]);
          nb[static_cast<std::size_t>(a)] = {m, g.spacing(a)};
        }
        const double cand = eikonal_update(nb);
        if (cand < dist[flat]) {
          change = std::max(change, std::isfinite(dist[flat]) ? dist[flat] - cand : inf);
          dist[flat] = cand;
        }
      }
    }
    if (change <= 1e-12 * g.min_spacing()) break;
  }

  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) out[i] = u[i] > 0 ? dist[i] : u[i] < 0 ? -dist[i] : 0.0;
  return {ScalarField(g, std::move(out)), true};
}

// Convergence measure ---------------------------------------------------------

namespace {

double node_gradient_norm(const ScalarField& u, Index i) {
  const auto& g = u.grid();
  double sq = 0;
  for (int a = 0; a < g.dim(); ++a) {
    const Index k = g.index_along(i, a), s = g.stride(a);
    double dv;
    if (k == 0)
      dv = (u[i + s] - u[i]) / g.spacing(a);
    else if (k == g.cells(a))
      dv = (u[i] - u[i - s]) / g.spacing(a);
    else
      dv = (u[i + s] - u[i - s]) / (2 * g.spacing(a));
    sq += dv * dv;
  }
  return std::sqrt(sq);
}

bool positive_side(double v) { return v >= 0; }

}  // namespace

double front_shift(const ScalarField& u, const ScalarField& next) {
  require_same_grid(u.grid(), next.grid(), "front_shift");
  const auto& g = u.grid();
  double shift = 0;
  std::vector<char> near_front(static_cast<std::size_t>(g.size()), 0);
  for (Index i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.dim(); ++a) {
      if (g.index_along(i, a) == g.cells(a)) continue;
      const Index j = i + g.stride(a);
      if (positive_side(u[i]) == positive_side(u[j])) continue;
      near_front[static_cast<std::size_t>(i)] = near_front[static_cast<std::size_t>(j)] = 1;
      const double t = u[i] / (u[i] - u[j]);
      const double moved = (1 - t) * (next[i] - u[i]) + t * (next[j] - u[j]);
      const double slope = std::max({(1 - t) * node_gradient_norm(u, i) + t * node_gradient_norm(u, j),
                                     std::abs(u[j] - u[i]) / g.spacing(a), 1e-300});
      shift = std::max(shift, std::abs(moved) / slope);
    }
  }
  for (Index i = 0; i < g.size(); ++i)
    if (positive_side(u[i]) != positive_side(next[i]) && !near_front[static_cast<std::size_t>(i)])
      return std::numeric_limits<double>::infinity();
  return shift;
}

// Training ---------------------------------------------------------------------

void write_trace_csv(std::ostream& os, const EvolutionTrace& trace) {
  os << "# status=" << to_string(trace.status) << '\n';
  os << "# restarted=" << (trace.restarted ? 1 : 0) << '\n';
  os << "# eps_h=" << to_text(trace.params.eps_h) << '\n';
  os << "# lambda=" << to_text(trace.params.lambda) << '\n';
  os << "# dt_initial=" << to_text(trace.params.dt) << '\n';
  os << "# descent=" << to_string(trace.params.descent) << '\n';
  os << "# rejected_steps=" << trace.rejected_steps << '\n';
  os << "iteration,energy,max_update,reinit,front_shift\n";
  for (const auto& r : trace.records)
    os << r.iteration << ',' << to_text(r.energy) << ',' << to_text(r.max_update) << ',' << (r.reinit ? 1 : 0) << ','
       << to_text(r.front_shift) << '\n';
}

void save_trace_csv(const std::string& path, const EvolutionTrace& trace) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io_failure, "cannot write " + path);
  write_trace_csv(os, trace);
}

TrainResult train(const DensityPair& d, const MeasureEnergy& e, const TrainConfig& cfg) {
  const GridSpec& grid = d.grid();
  require_same_grid(grid, d.f_neg.grid(), "train");
  if (cfg.reinit_every < 1 || cfg.max_iter < 1 || !(cfg.tol > 0))
    throw Error(ErrorCode::invalid_argument, "train: reinit_every, max_iter and tol must be positive");

  EvolutionTrace trace;
  StepParams p = resolve_params(cfg, grid);
  const bool auto_step = !cfg.dt.has_value();

  ScalarField u = init_shape(grid, cfg.init);
  std::optional<EnergyEvaluation> ev;
  auto restart = [&](const Error& err) {
    if (trace.restarted || err.code() != ErrorCode::vanishing_positive_mass) throw err;
    trace.restarted = true;
    u = init_shape(grid, InitShape<double>{Lattice<double>{}});
  };
  while (!ev) {
    try {
      ev = evaluate_with_gradient(e, u, d, p.eps_h);
    } catch (const Error& err) {
      restart(err);
    }
  }

  Eigen::VectorXd dir = descent_direction(e, u, d, p, &*ev);
  if (auto_step) p.dt = auto_dt(dir, grid, p.lambda);
  if (!std::isfinite(p.dt)) p.dt = 1.0;
  trace.params = p;
  trace.records.push_back({0, ev->energy, 0.0, 0.0, false});

  const double max_move = 10 * grid.max_spacing();
  int quiet = 0;
  std::optional<double> last_settled;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    ScalarField next(grid, u.values() - p.dt * dir);
    const double moved = (next.values() - u.values()).cwiseAbs().maxCoeff();
    if (!(moved <= max_move)) {
      ++trace.rejected_steps;
      p.dt *= 0.5;
      if (!(p.dt > 0) || trace.rejected_steps > 60)
        throw Error(ErrorCode::step_rejected, "train: time step collapsed after repeated rejections");
      --it;
      continue;
    }
    const double shift = front_shift(u, next);
    u = std::move(next);
    const bool reinit = it % cfg.reinit_every == 0;
    if (reinit) u = reinitialize(u).field;

    try {
      ev = evaluate_with_gradient(e, u, d, p.eps_h);
    } catch (const Error& err) {
      restart(err);
      ev = evaluate_with_gradient(e, u, d, p.eps_h);
      quiet = 0;
      last_settled.reset();
      dir = descent_direction(e, u, d, p, &*ev);
      if (auto_step) p.dt = auto_dt(dir, grid, p.lambda);
      trace.records.push_back({it, ev->energy, moved, shift, true});
      continue;
    }
    trace.records.push_back({it, ev->energy, moved, shift, reinit});
    dir = descent_direction(e, u, d, p, &*ev);

    if (!reinit) continue;
    if (auto_step) {
      const double dt = auto_dt(dir, grid, p.lambda);
      if (std::isfinite(dt)) p.dt = dt;
    }
    if (last_settled) {
      const double drift = std::abs(ev->energy - *last_settled) / cfg.reinit_every;
      quiet = drift <= cfg.tol * std::abs(*last_settled) ? quiet + 1 : 0;
    }
    last_settled = ev->energy;
    if (quiet >= convergence_periods) {
      trace.status = TrainStatus::converged;
      break;
    }
  }
  return {std::move(u), std::move(trace)};
}

}  // namespace ofc
