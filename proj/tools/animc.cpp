// Command-line front end: generate | perturb | fit | eval | sweep.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "animc/commands.hpp"

namespace {

using namespace animc;

const std::map<std::string, LabelMode> kLabelModes{
    {"kmeans", LabelMode::kmeans}, {"argmax", LabelMode::argmax}};

void add_hyperparams(CLI::App* cmd, cli::FitOptions& f) {
  cmd->add_option("--alpha", f.hp.alpha, "regression and latent penalty")
      ->capture_default_str();
  cmd->add_option("--beta", f.hp.beta, "theta-norm penalty on A")
      ->capture_default_str();
  cmd->add_option("--r", f.hp.r, "weight exponent in (0, 2]")
      ->capture_default_str();
  cmd->add_option("--theta-v", f.hp.theta_V)->capture_default_str();
  cmd->add_option("--theta-a", f.hp.theta_A)->capture_default_str();
  cmd->add_option("--max-iter", f.hp.max_iter)->capture_default_str();
  cmd->add_option("--tol", f.hp.rel_tol, "relative objective change to stop")
      ->capture_default_str();
  cmd->add_option("--label-mode", f.label_mode)
      ->transform(CLI::CheckedTransformer(kLabelModes, CLI::ignore_case))
      ->capture_default_str();
  cmd->add_flag("--no-soft-boundary{false}", f.soft_boundary,
                "drop the boundary cap in the weight rule");
  cmd->add_flag("--freeze-weights", f.freeze_weights,
                "keep every weight at 1/m");
}

// Grid flags arrive as text so that an empty list stays empty instead of
// parsing as 0.
std::vector<double> parse_reals(const std::vector<std::string>& items,
                                const std::string& flag) {
  std::vector<double> out;
  for (const auto& item : items) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::vector<std::string> non_empty(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auto-weighted incomplete multi-view clustering"};
  app.require_subcommand(1);

  cli::GenerateOptions gen;
  gen.spec.dims.clear();
  auto* g = app.add_subcommand("generate", "write a synthetic dataset");
  g->add_option("--n", gen.spec.n)->capture_default_str();
  g->add_option("--views", gen.spec.m)->capture_default_str();
  g->add_option("--clusters", gen.spec.c)->capture_default_str();
  g->add_option("--dims", gen.spec.dims, "one dimension per view (default 100 150)")
      ->delimiter(',');
  g->add_option("--separation", gen.spec.separation)->capture_default_str();
  g->add_option("--noise", gen.spec.noise, "per-feature noise std")
      ->capture_default_str();
  g->add_option("--seed", gen.spec.seed)->capture_default_str();
  g->add_option("--out", gen.out)->required();

  cli::PerturbOptions pert;
  auto* p = app.add_subcommand("perturb", "delete instances and add noise");
  p->add_option("--in", pert.in)->required()->check(CLI::ExistingFile);
  p->add_option("--out", pert.out)->required();
  p->add_option("--per", pert.per, "missing rate per view")->capture_default_str();
  p->add_option("--noise-rate", pert.noise_rate)->capture_default_str();
  p->add_option("--noise-variance", pert.noise_variance)->capture_default_str();
  p->add_flag("--normalize", pert.normalize,
              "scale each view to unit max-abs before adding noise");
  p->add_option("--seed", pert.seed)->capture_default_str();

  cli::FitCommandOptions fit;
  auto* f = app.add_subcommand("fit", "fit one model and print a report");
  f->add_option("--in", fit.in)->required()->check(CLI::ExistingFile);
  f->add_option("--algo", fit.fit.algo)
      ->check(CLI::IsMember(cli::algorithms()))
      ->capture_default_str();
  add_hyperparams(f, fit.fit);
  f->add_option("--seed", fit.fit.seed)->capture_default_str();
  f->add_option("--out-state", fit.out_state);
  f->add_option("--out-trace", fit.out_trace);

  cli::EvalOptions ev;
  std::vector<std::string> modes;
  auto* e = app.add_subcommand("eval", "score a saved state against labels");
  e->add_option("--state", ev.state)->required()->check(CLI::ExistingFile);
  e->add_option("--dataset", ev.dataset)->required()->check(CLI::ExistingFile);
  e->add_option("--label-mode", modes, "kmeans and/or argmax (default: stored)")
      ->check(CLI::IsMember({"kmeans", "argmax"}))
      ->delimiter(',');

  cli::SweepOptions sw;
  std::vector<std::string> pers{"0.1", "0.3", "0.5"};
  std::vector<std::string> algos{"animc"};
  std::vector<std::string> rates{"0"};
  auto* s = app.add_subcommand("sweep", "grid of perturbations and algorithms");
  s->add_option("--in", sw.in)->required()->check(CLI::ExistingFile);
  s->add_option("--per", pers, "missing rates")->delimiter(',')->capture_default_str();
  s->add_option("--algo", algos)->delimiter(',')->capture_default_str();
  s->add_option("--noise-rate", rates)->delimiter(',')->capture_default_str();
  s->add_option("--noise-variance", sw.noise_variance)->capture_default_str();
  s->add_flag("--normalize", sw.normalize);
  s->add_option("--repeats", sw.repeats)->capture_default_str();
  s->add_option("--seed", sw.seed)->capture_default_str();
  s->add_flag("--no-timing{false}", sw.timing, "leave the seconds column empty");
  add_hyperparams(s, sw.fit);
  s->add_option("--out-csv", sw.out_csv)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*g) {
      if (gen.spec.dims.empty()) gen.spec.dims = SynthSpec{}.dims;
      cli::cmd_generate(gen);
    } else if (*p) {
      cli::cmd_perturb(pert);
    } else if (*f) {
      std::cout << cli::cmd_fit(fit);
    } else if (*e) {
      for (const auto& m : modes) ev.modes.push_back(io::parse_label_mode(m));
      std::cout << cli::cmd_eval(ev);
    } else if (*s) {
      sw.pers = parse_reals(pers, "--per");
      sw.noise_rates = parse_reals(rates, "--noise-rate");
      sw.algos = non_empty(algos);
      cli::cmd_sweep(sw);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code_for(err);
  }
  return kOk;
}
