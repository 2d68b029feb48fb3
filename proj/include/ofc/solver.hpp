#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ofc/data.hpp"
#include "ofc/density.hpp"
#include "ofc/energy.hpp"
#include "ofc/field.hpp"
#include "ofc/shapes.hpp"

namespace ofc {

enum class Descent { derivative, literal };

const char* to_string(Descent d);
Descent parse_descent(const std::string& s);

/// Training parameters. Unset optionals are resolved from the grid:
/// eps_h = 1.5 h, lambda = 0.1 h², dt = 0.5 h / max|descent| (re-evaluated
/// after every reinitialisation), where h is the largest cell spacing.
struct TrainConfig {
  MeasureKind measure = MeasureKind::f_measure;
  double beta = 1;
  std::optional<double> dt;
  std::optional<double> lambda;
  std::optional<double> eps_h;
  /// Convergence: the energy of the reinitialised field drifts by at most
  /// tol |E| per iteration over 3 consecutive reinitialisation periods.
  double tol = 1e-5;
  int reinit_every = 50;
  int max_iter = 10000;
  /// Cells per axis; empty picks 1024 (1-D), 128 (2-D), 64 (3-D) or 16.
  std::vector<Index> resolution;
  InitShape<double> init = Lattice<double>{};
  std::uint64_t seed = default_seed;
  Descent descent = Descent::derivative;
};

std::vector<Index> default_resolution(int dim);

/// Parameters actually used by a run.
struct StepParams {
  double dt;
  double lambda;
  double eps_h;
  Descent descent = Descent::derivative;
};

StepParams resolve_params(const TrainConfig& cfg, const GridSpec& grid);

/// u - dt·(D[u] - λΔu), D being E'[u] or the literal G field. Throws
/// step_rejected when any node would move by more than 10 cell widths.
ScalarField step(const ScalarField& u, const MeasureEnergy& e, const DensityPair& d, const StepParams& p);

struct Reinitialized {
  ScalarField field;
  /// False when u has a single sign and was returned unchanged.
  bool had_interface;
};

/// Signed distance to the zero level set of u with the sign of u kept at
/// every node. Crossings are located on grid edges by linear interpolation,
/// then distances are propagated by fast sweeping.
Reinitialized reinitialize(const ScalarField& u);

/// Largest displacement of the zero level set between u and next, measured
/// along the normal at each sign-change edge of u. Infinite when a sign
/// change appears away from every existing crossing.
double front_shift(const ScalarField& u, const ScalarField& next);

struct TraceRecord {
  int iteration;
  double energy;
  double max_update;
  double front_shift;
  bool reinit;
};

enum class TrainStatus { converged, max_iter };

const char* to_string(TrainStatus s);

struct EvolutionTrace {
  std::vector<TraceRecord> records;
  TrainStatus status = TrainStatus::max_iter;
  bool restarted = false;
  StepParams params{};
  int rejected_steps = 0;
};

/// CSV with `# key=value` header lines then
/// iteration,energy,max_update,reinit,front_shift.
void write_trace_csv(std::ostream& os, const EvolutionTrace& trace);
void save_trace_csv(const std::string& path, const EvolutionTrace& trace);

struct TrainResult {
  ScalarField u;
  EvolutionTrace trace;
};

/// Evolves cfg.init under the gradient flow of `e` until the energy settles
/// (see TrainConfig::tol) or max_iter is reached. An initialisation holding no positive mass is
/// restarted once from the default lattice.
TrainResult train(const DensityPair& d, const MeasureEnergy& e, const TrainConfig& cfg);

}  // namespace ofc
