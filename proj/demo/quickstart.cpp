// Generate a synthetic two-view dataset, hide 30% of each view, fit the
// model and score the clustering.

#include <iostream>

#include "animc/animc.hpp"
#include "animc/metrics.hpp"
#include "animc/perturbation.hpp"

int main() {
  animc::SynthSpec spec;
  spec.seed = 7;
  const auto clean = animc::synth_generate(spec);
  const auto ds = animc::apply_missing(clean, 0.3, 8);

  animc::AnimcConfig cfg;
  cfg.seed = 9;
  const auto res = animc::fit(ds, cfg);

  const auto labels = animc::predict_labels(res.state, ds.c, cfg.label_mode, cfg.seed);
  const auto scores = animc::evaluate(labels, *ds.labels);
  std::cout << "iterations " << res.iterations << (res.converged ? " (converged)\n" : "\n")
            << "weights    " << res.state.w.transpose() << '\n'
            << "ACC " << scores.acc << "  NMI " << scores.nmi << "  purity " << scores.purity
            << '\n';
}
