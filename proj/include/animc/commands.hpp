#pragma once

// Implementations behind the command-line tool. Each command takes a plain
// options struct, does its file IO and returns what it printed, so tests can
// drive the commands without a process boundary.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "animc/animc.hpp"
#include "animc/baselines.hpp"
#include "animc/dataset.hpp"
#include "animc/errors.hpp"
#include "animc/io.hpp"
#include "animc/metrics.hpp"
#include "animc/perturbation.hpp"

namespace animc {

/// Bad flag combinations; maps to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kUsage;
  if (dynamic_cast<const DomainError*>(&e)) return kUsage;
  if (dynamic_cast<const ValidationError*>(&e)) return kData;
  if (dynamic_cast<const DimensionError*>(&e)) return kData;
  return kNumeric;
}

namespace cli {

inline const std::vector<std::string>& algorithms() {
  static const std::vector<std::string> names{"animc", "rmf", "semi-nmf",
                                              "semi-rnmf", "naive"};
  return names;
}

inline void require_algorithm(const std::string& algo) {
  for (const auto& a : algorithms()) {
    if (a == algo) return;
  }
  throw UsageError("unknown algorithm '" + algo + "'");
}

// splitmix64 finalizer; derives independent sub-seeds from one seed.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL));
}

/// All views stacked vertically; absent columns are already zero.
inline Matrix concatenate_views(const MultiViewDataset& ds) {
  Eigen::Index rows = 0;
  for (const auto& v : ds.views) rows += v.x.dims();
  Matrix X(rows, ds.n());
  Eigen::Index at = 0;
  for (const auto& v : ds.views) {
    X.middleRows(at, v.x.dims()) = v.x.data;
    at += v.x.dims();
  }
  return X;
}

struct FitOptions {
  std::string algo = "animc";
  Hyperparams hp;
  LabelMode label_mode = LabelMode::kmeans;
  bool soft_boundary = true;
  bool freeze_weights = false;
  std::uint64_t seed = 0;
};

struct FitOutcome {
  io::StateFile state;
  std::vector<TraceRecord> trace;
  bool converged = false;
  double seconds = 0.0;
};

inline FitOutcome run_fit(const MultiViewDataset& ds, const FitOptions& opt) {
  require_algorithm(opt.algo);
  opt.hp.validate();
  const auto start = std::chrono::steady_clock::now();
  FitOutcome out;
  out.state.algo = opt.algo;
  out.state.label_mode = opt.label_mode;
  out.state.seed = opt.seed;

  if (opt.algo == "animc" || opt.algo == "naive") {
    AnimcConfig cfg;
    cfg.hp = opt.hp;
    cfg.enable_soft_boundary = opt.soft_boundary;
    cfg.freeze_weights = opt.freeze_weights;
    cfg.label_mode = opt.label_mode;
    cfg.seed = opt.seed;
    if (opt.algo == "naive") {
      cfg.freeze_weights = true;
      cfg.initial_weight = 1.0;
    }
    FitResult res = fit(ds, cfg);
    out.state.state = std::move(res.state);
    out.state.iterations = res.iterations;
    out.trace = std::move(res.trace.records);
    out.converged = res.converged;
  } else {
    validate_dataset(ds);
    const Matrix X = concatenate_views(ds);
    IterationControl ctrl{opt.hp.max_iter, opt.hp.rel_tol, opt.hp.epsilon_floor,
                          opt.seed};
    FactorizationResult res;
    if (opt.algo == "rmf") {
      res = rmf_fit(X, ds.c, opt.hp.alpha, ctrl);
    } else if (opt.algo == "semi-rnmf") {
      res = semi_rnmf_fit(X, ds.c, opt.hp.alpha, ctrl);
    } else {
      res = semi_nmf_fit(X, ds.c, ctrl);
    }
    out.state.state.U = std::move(res.U);
    out.state.state.V = std::move(res.V);
    out.state.iterations = res.iterations_run;
    for (std::size_t i = 0; i < res.objective_trace.size(); ++i) {
      TraceRecord rec;
      rec.iter = static_cast<int>(i);
      rec.objective = res.objective_trace[i];
      rec.r_objective = std::nan("");
      out.trace.push_back(std::move(rec));
    }
    out.converged = res.iterations_run < opt.hp.max_iter;
  }
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

inline Labels state_labels(const io::StateFile& f, LabelMode mode) {
  return predict_labels(f.state.V, static_cast<int>(f.state.V.cols()), mode,
                        f.seed);
}

inline void check_state_matches(const io::StateFile& f,
                                const MultiViewDataset& ds) {
  if (f.state.V.rows() != ds.n() || f.state.V.cols() != ds.c) {
    throw DimensionError("state V is " +
                         detail::shape(f.state.V.rows(), f.state.V.cols()) +
                         " but the dataset has n=" + std::to_string(ds.n()) +
                         ", c=" + std::to_string(ds.c));
  }
}

inline nlohmann::ordered_json metrics_json(const MetricBundle& b) {
  nlohmann::ordered_json j;
  j["acc"] = b.acc;
  j["nmi"] = b.nmi;
  j["purity"] = b.purity;
  return j;
}

// ---- generate ------------------------------------------------------------

struct GenerateOptions {
  SynthSpec spec;
  std::string out;
};

inline MultiViewDataset cmd_generate(const GenerateOptions& opt) {
  if (static_cast<int>(opt.spec.dims.size()) != opt.spec.m) {
    throw UsageError("--dims needs one entry per view (" +
                     std::to_string(opt.spec.m) + "), got " +
                     std::to_string(opt.spec.dims.size()));
  }
  MultiViewDataset ds = synth_generate(opt.spec);
  if (!opt.out.empty()) io::save_dataset(opt.out, ds);
  return ds;
}

// ---- perturb -------------------------------------------------------------

struct PerturbOptions {
  std::string in;
  std::string out;
  double per = 0.0;
  double noise_rate = 0.0;
  double noise_variance = 0.0;
  bool normalize = false;
  NoiseUnit unit = NoiseUnit::entries;
  std::uint64_t seed = 0;
};

inline MultiViewDataset perturb(const MultiViewDataset& ds, double per,
                                double noise_rate, double noise_variance,
                                bool normalize, NoiseUnit unit,
                                std::uint64_t seed) {
  MultiViewDataset out = apply_missing(ds, per, derive_seed(seed, 1));
  if (noise_rate > 0.0 || normalize) {
    NoiseSpec spec;
    spec.rate = noise_rate;
    spec.variance = noise_variance;
    spec.normalize_first = normalize;
    spec.unit = unit;
    spec.seed = derive_seed(seed, 2);
    out = add_gaussian_noise(out, spec);
  }
  return out;
}

inline MultiViewDataset cmd_perturb(const PerturbOptions& opt) {
  const MultiViewDataset ds = io::load_dataset(opt.in);
  MultiViewDataset out = perturb(ds, opt.per, opt.noise_rate, opt.noise_variance,
                                 opt.normalize, opt.unit, opt.seed);
  if (!opt.out.empty()) io::save_dataset(opt.out, out);
  return out;
}

// ---- fit -----------------------------------------------------------------

struct FitCommandOptions {
  std::string in;
  FitOptions fit;
  std::string out_state;
  std::string out_trace;
};

/// Runs the fit, writes state and trace, returns the report document.
inline std::string cmd_fit(const FitCommandOptions& opt) {
  const MultiViewDataset ds = io::load_dataset(opt.in);
  FitOutcome res = run_fit(ds, opt.fit);
  if (!opt.out_state.empty()) io::save_state(opt.out_state, res.state);
  const std::size_t m = res.state.state.w.size() > 0 ? ds.m() : 0;
  if (!opt.out_trace.empty()) {
    io::write_file(opt.out_trace, io::trace_to_csv(res.trace, m));
  }

  const auto& hp = opt.fit.hp;
  nlohmann::ordered_json report;
  report["algo"] = opt.fit.algo;
  nlohmann::ordered_json cfg;
  cfg["alpha"] = hp.alpha;
  cfg["beta"] = hp.beta;
  cfg["r"] = hp.r;
  cfg["theta_v"] = hp.theta_V;
  cfg["theta_a"] = hp.theta_A;
  cfg["max_iter"] = hp.max_iter;
  cfg["tol"] = hp.rel_tol;
  cfg["label_mode"] = io::label_mode_name(opt.fit.label_mode);
  cfg["soft_boundary"] = opt.fit.soft_boundary;
  cfg["freeze_weights"] = opt.fit.freeze_weights;
  cfg["seed"] = opt.fit.seed;
  report["config"] = cfg;
  if (ds.labels) {
    report["metrics"] = metrics_json(
        evaluate(state_labels(res.state, opt.fit.label_mode), *ds.labels));
  }
  std::vector<double> w(res.state.state.w.data(),
                        res.state.state.w.data() + res.state.state.w.size());
  report["w"] = w;
  report["iterations"] = res.state.iterations;
  report["converged"] = res.converged;
  report["seconds"] = res.seconds;
  report["trace"] = opt.out_trace;
  return report.dump(2) + "\n";
}

// ---- eval ----------------------------------------------------------------

struct EvalOptions {
  std::string state;
  std::string dataset;
  // Label modes to report; empty means the one stored in the state.
  std::vector<LabelMode> modes;
};

inline std::string cmd_eval(const EvalOptions& opt) {
  const io::StateFile f = io::load_state(opt.state);
  const MultiViewDataset ds = io::load_dataset(opt.dataset);
  if (!ds.labels) throw ValidationError("dataset has no labels to evaluate against");
  check_state_matches(f, ds);
  if (opt.modes.empty()) {
    return metrics_json(evaluate(state_labels(f, f.label_mode), *ds.labels))
               .dump(2) +
           "\n";
  }
  nlohmann::ordered_json j;
  for (LabelMode mode : opt.modes) {
    j[io::label_mode_name(mode)] =
        metrics_json(evaluate(state_labels(f, mode), *ds.labels));
  }
  return j.dump(2) + "\n";
}

// ---- sweep ---------------------------------------------------------------

struct SweepOptions {
  std::string in;
  std::vector<double> pers{0.1, 0.3, 0.5};
  std::vector<std::string> algos{"animc"};
  std::vector<double> noise_rates{0.0};
  double noise_variance = 0.1;
  bool normalize = false;
  int repeats = 10;
  std::uint64_t seed = 0;
  FitOptions fit;  // algo and seed are overridden per row
  // Wall-clock seconds per row; off leaves the column empty so reruns match
  // byte for byte.
  bool timing = true;
  std::string out_csv;
};

namespace detail {

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Sample standard deviation; 0 for a single value.
inline double stddev(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

}  // namespace detail

/// Rows for every (per, noise_rate, repeat, algo), then one mean and one std
/// row per (algo, per, noise_rate) over the successful repeats. All
/// algorithms in a cell share the perturbed dataset and fit seed. A failing
/// row keeps its error text in the status column and the sweep continues.
inline std::string cmd_sweep(const SweepOptions& opt) {
  if (opt.pers.empty() || opt.algos.empty() || opt.noise_rates.empty()) {
    throw UsageError("sweep grid is empty");
  }
  if (opt.repeats <= 0) throw UsageError("repeats must be positive");
  for (const auto& a : opt.algos) require_algorithm(a);
  opt.fit.hp.validate();
  const MultiViewDataset base = io::load_dataset(opt.in);
  if (!base.labels) throw ValidationError("sweep needs a labelled dataset");

  std::string csv = io::results_header();
  using Key = std::tuple<std::string, double, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<io::ResultRow>> groups;

  std::uint64_t cell = 0;
  for (double per : opt.pers) {
    for (double rate : opt.noise_rates) {
      for (int rep = 0; rep < opt.repeats; ++rep, ++cell) {
        const std::uint64_t seed = derive_seed(opt.seed, cell);
        std::optional<MultiViewDataset> ds;
        std::string data_error;
        try {
          ds = perturb(base, per, rate, opt.noise_variance, opt.normalize,
                       NoiseUnit::entries, seed);
        } catch (const std::exception& e) {
          data_error = e.what();
        }
        for (const auto& algo : opt.algos) {
          io::ResultRow row;
          row.algo = algo;
          row.per = per;
          row.noise_rate = rate;
          row.repeat = std::to_string(rep);
          row.seed = seed;
          if (!ds) {
            row.status = "error: " + data_error;
          } else {
            try {
              FitOptions fo = opt.fit;
              fo.algo = algo;
              fo.seed = seed;
              const FitOutcome res = run_fit(*ds, fo);
              row.metrics =
                  evaluate(state_labels(res.state, fo.label_mode), *ds->labels);
              row.iters = res.state.iterations;
              if (opt.timing) row.seconds = res.seconds;
            } catch (const std::exception& e) {
              row.status = std::string("error: ") + e.what();
            }
          }
          csv += io::result_line(row);
          const Key key{algo, per, rate};
          if (!groups.count(key)) order.push_back(key);
          groups[key].push_back(std::move(row));
        }
      }
    }
  }

  for (const auto& key : order) {
    std::vector<double> acc, nmi_v, pur, iters, secs;
    for (const auto& r : groups[key]) {
      if (!r.metrics) continue;
      acc.push_back(r.metrics->acc);
      nmi_v.push_back(r.metrics->nmi);
      pur.push_back(r.metrics->purity);
      iters.push_back(*r.iters);
      if (r.seconds) secs.push_back(*r.seconds);
    }
    for (const char* stat : {"mean", "std"}) {
      io::ResultRow row;
      std::tie(row.algo, row.per, row.noise_rate) = key;
      row.repeat = stat;
      row.seed = opt.seed;
      const bool is_mean = std::string(stat) == "mean";
      auto agg = [&](const std::vector<double>& x) {
        return is_mean ? detail::mean(x) : detail::stddev(x);
      };
      if (acc.empty()) {
        row.status = "no successful repeats";
      } else {
        row.metrics = MetricBundle{agg(acc), agg(nmi_v), agg(pur)};
        row.iters = agg(iters);
        if (!secs.empty()) row.seconds = agg(secs);
        row.status = "n=" + std::to_string(acc.size());
      }
      csv += io::result_line(row);
    }
  }
  if (!opt.out_csv.empty()) io::write_file(opt.out_csv, csv);
  return csv;
}

}  // namespace cli
}  // namespace animc
