// Command-line front end: data generation, training, prediction, experiments
// and model export.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ofc/classifier.hpp"
#include "ofc/field_io.hpp"
#include "ofc/format.hpp"
#include "ofc/harness.hpp"

namespace {

using namespace ofc;

enum Exit { ok = 0, usage = 1, data_error = 2, numerical = 3 };

int exit_code(const Error& e) {
  if (e.code() == ErrorCode::invalid_argument) return usage;
  return is_numerical(e.code()) ? numerical : data_error;
}

bool is_descriptor(const std::string& s) {
  return s == "toy1d" || (s.size() == 3 && s.rfind("db", 0) == 0) || s.rfind("csv:", 0) == 0 ||
         s.rfind("skin:", 0) == 0;
}

LabeledDataset read_data(const std::string& source, std::uint64_t seed) {
  return is_descriptor(source) ? load_dataset(source, seed) : load_csv(source);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io_failure, "cannot write " + path);
  return os;
}

// Options shared by train and the experiment commands.
struct TrainOptions {
  std::string config;
  std::string measure;
  std::optional<double> beta, dt, lambda, eps_h, tol;
  std::optional<int> reinit_every, max_iter;
  std::vector<Index> resolution;
  std::string init, descent;

  void add(CLI::App* app) {
    app->add_option("--config", config, "key=value file of training settings");
    app->add_option("--measure", measure, "f-measure or accuracy");
    app->add_option("--beta", beta, "F-measure beta");
    app->add_option("--dt", dt, "time step (default: adaptive)");
    app->add_option("--lambda", lambda, "regularisation weight");
    app->add_option("--eps-h", eps_h, "Heaviside width in feature units");
    app->add_option("--tol", tol, "front displacement tolerance");
    app->add_option("--reinit-every", reinit_every, "iterations between reinitialisations");
    app->add_option("--max-iter", max_iter, "iteration cap");
    app->add_option("--resolution", resolution, "cells per axis")->expected(1, 8);
    app->add_option("--init", init, "'lattice [n r offset]', 'sphere r c...' or 'box lo... hi...'");
    app->add_option("--descent", descent, "derivative or G");
  }

  TrainConfig resolve(std::uint64_t seed) const {
    TrainConfig cfg;
    if (!config.empty()) {
      std::ifstream is(config);
      if (!is) throw Error(ErrorCode::io_failure, "cannot read " + config);
      std::string line;
      while (std::getline(is, line)) {
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos || !parse_config_entry(cfg, std::string(trim(t.substr(0, eq))),
                                                                std::string(trim(t.substr(eq + 1)))))
          throw Error(ErrorCode::parse_error, config + ": bad line '" + std::string(t) + "'");
      }
    }
    if (!measure.empty()) cfg.measure = parse_measure_kind(measure);
    if (beta) cfg.beta = *beta;
    if (dt) cfg.dt = *dt;
    if (lambda) cfg.lambda = *lambda;
    if (eps_h) cfg.eps_h = *eps_h;
    if (tol) cfg.tol = *tol;
    if (reinit_every) cfg.reinit_every = *reinit_every;
    if (max_iter) cfg.max_iter = *max_iter;
    if (!resolution.empty()) cfg.resolution = resolution;
    if (!init.empty()) parse_config_entry(cfg, "init", init);
    if (!descent.empty()) cfg.descent = parse_descent(descent);
    cfg.seed = seed;
    return cfg;
  }
};

void write_labels(std::ostream& os, const std::vector<Prediction>& p) {
  os << "label,clamped\n";
  for (const auto& q : p) os << (q.label == Label::positive ? 1 : 0) << ',' << (q.clamped ? 1 : 0) << '\n';
}

void write_field_csv(std::ostream& os, const ScalarField& u) {
  const auto& g = u.grid();
  for (int a = 0; a < g.dim(); ++a) os << 'x' << a << ',';
  os << "u\n";
  for (Index i = 0; i < u.size(); ++i) {
    const auto x = g.node(i);
    for (int a = 0; a < g.dim(); ++a) os << to_text(x[a]) << ',';
    os << to_text(u[i]) << '\n';
  }
}

std::vector<double> default_betas() {
  std::vector<double> b;
  for (int i = 1; i <= 9; ++i) b.push_back(0.2 * i);
  return b;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set classifiers that maximise the F-measure"};
  app.require_subcommand(1);
  std::uint64_t seed = default_seed;
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", seed, "random seed")->capture_default_str(); };

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic dataset as CSV");
  std::string gen_name, gen_out;
  gen->add_option("dataset", gen_name, "toy1d, db1, db2, db3 or db4")->required();
  gen->add_option("-o,--out", gen_out, "output CSV")->required();
  add_seed(gen);

  // train
  auto* tr = app.add_subcommand("train", "fit a classifier");
  std::string tr_data, tr_model, tr_trace;
  TrainOptions tr_opts;
  tr->add_option("data", tr_data, "CSV file or dataset name (toy1d, db1..db4, skin:<path>)")->required();
  tr->add_option("-m,--model", tr_model, "output model file")->required();
  tr->add_option("--trace", tr_trace, "output trace CSV");
  tr_opts.add(tr);
  add_seed(tr);

  // predict
  auto* pr = app.add_subcommand("predict", "label the rows of a CSV");
  std::string pr_model, pr_data, pr_out;
  pr->add_option("-m,--model", pr_model, "model file")->required();
  pr->add_option("data", pr_data, "CSV of points, with or without a trailing label column")->required();
  pr->add_option("-o,--out", pr_out, "output CSV (label,clamped)")->required();
  add_seed(pr);

  // eval
  auto* ev = app.add_subcommand("eval", "run a cross-validation experiment");
  std::string ev_config, ev_out, ev_raw;
  std::optional<int> ev_workers;
  ev->add_option("config", ev_config, "experiment key=value file")->required();
  ev->add_option("-o,--out", ev_out, "summary CSV")->required();
  ev->add_option("--raw", ev_raw, "per-fold CSV");
  ev->add_option("--workers", ev_workers, "concurrent cells");
  add_seed(ev);

  // sweep-beta
  auto* sw = app.add_subcommand("sweep-beta", "F_beta of every method across a beta grid");
  std::string sw_config, sw_out, sw_summary, sw_raw;
  std::vector<double> sw_betas;
  std::optional<int> sw_workers;
  sw->add_option("config", sw_config, "experiment key=value file")->required();
  sw->add_option("-o,--out", sw_out, "sweep CSV")->required();
  sw->add_option("--betas", sw_betas, "beta grid (default 0.2 ... 1.8)")->delimiter(',');
  sw->add_option("--summary", sw_summary, "summary CSV");
  sw->add_option("--raw", sw_raw, "per-fold CSV");
  sw->add_option("--workers", sw_workers, "concurrent cells");
  add_seed(sw);

  // frontier
  auto* fr = app.add_subcommand("frontier", "export the decision frontier");
  std::string fr_model, fr_out;
  fr->add_option("-m,--model", fr_model, "model file")->required();
  fr->add_option("-o,--out", fr_out, "output CSV")->required();
  add_seed(fr);

  // field
  auto* fi = app.add_subcommand("field", "export u as a PGM heatmap (2-D) or a node CSV");
  std::string fi_model, fi_out;
  fi->add_option("-m,--model", fi_model, "model file")->required();
  fi->add_option("-o,--out", fi_out, "output .pgm or .csv")->required();
  add_seed(fi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*gen) {
      save_csv(gen_out, load_dataset(gen_name, seed));
    } else if (*tr) {
      const TrainConfig cfg = tr_opts.resolve(seed);
      const LabeledDataset data = read_data(tr_data, seed);
      const FitResult r = fit(data, cfg);
      save_model(tr_model, r.model);
      if (!tr_trace.empty()) save_trace_csv(tr_trace, r.trace);
      std::cerr << "status=" << to_string(r.trace.status) << (r.trace.restarted ? " (restarted)" : "")
                << " iterations=" << r.trace.records.back().iteration
                << " energy=" << to_text(r.trace.records.back().energy) << '\n';
      if (r.model.degenerate()) std::cerr << "warning: model assigns one class everywhere\n";
    } else if (*pr) {
      const TrainedClassifier m = load_model(pr_model);
      Eigen::MatrixXd points = load_points(pr_data);
      // A trailing label column, as written by gen, is ignored.
      if (points.cols() == m.grid().dim() + 1) points.conservativeResize(Eigen::NoChange, m.grid().dim());
      if (points.cols() != m.grid().dim())
        throw Error(ErrorCode::dimension_error, "data has " + std::to_string(points.cols()) +
                                                    " features, model expects " + std::to_string(m.grid().dim()));
      auto os = open_out(pr_out);
      write_labels(os, predict_all(m, points));
    } else if (*ev || *sw) {
      ExperimentSpec spec = load_experiment(*ev ? ev_config : sw_config);
      if (app.get_subcommand(*ev ? "eval" : "sweep-beta")->count("--seed")) spec.seed = seed;
      spec.ofc.seed = spec.seed;
      if (*ev && ev_workers) spec.workers = *ev_workers;
      if (*sw) {
        if (sw_workers) spec.workers = *sw_workers;
        spec.betas = sw_betas.empty() ? default_betas() : sw_betas;
      }
      spec.validate();
      const LabeledDataset data = load_dataset(spec.dataset, spec.seed);
      if (auto w = data.dim() == 3 && spec.dataset.rfind("skin:", 0) == 0 ? skin_count_warning(data) : std::nullopt)
        std::cerr << "warning: " << *w << '\n';
      const ExperimentResult res = run_experiment(spec, data, &std::cerr);
      const std::string summary_path = *ev ? ev_out : sw_summary;
      const std::string raw_path = *ev ? ev_raw : sw_raw;
      if (!summary_path.empty()) {
        auto os = open_out(summary_path);
        write_summary_csv(os, res.summary);
      }
      if (!raw_path.empty()) {
        auto os = open_out(raw_path);
        write_raw_csv(os, res.folds);
      }
      if (*sw) {
        auto os = open_out(sw_out);
        write_sweep_csv(os, res.summary, spec.methods);
      }
      int failures = 0;
      for (const auto& r : res.summary) failures += r.failures;
      if (failures > 0) std::cerr << "warning: " << failures << " failed cells, see the raw CSV\n";
    } else if (*fr) {
      const Frontier f = frontier(load_model(fr_model));
      auto os = open_out(fr_out);
      write_frontier_csv(os, f);
    } else if (*fi) {
      const TrainedClassifier m = load_model(fi_model);
      const bool csv = fi_out.size() >= 4 && fi_out.substr(fi_out.size() - 4) == ".csv";
      if (csv) {
        auto os = open_out(fi_out);
        write_field_csv(os, m.u);
      } else {
        if (m.grid().dim() != 2)
          throw Error(ErrorCode::dimension_error, "heatmaps need a 2-D model; use a .csv output instead");
        save_pgm(fi_out, m.u);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return data_error;
  }
  return ok;
}
