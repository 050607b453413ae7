#include "flowsep/lddc.hpp"

#include <algorithm>
#include <cmath>

#include "flowsep/errors.hpp"

namespace flowsep {

double interpolation_residual(const StateSpaceModel& m, const ControllerSamples& samples) {
  double err = 0.0, scale = 0.0;
  for (const auto& s : samples.samples()) {
    err = std::max(err, std::abs(eval_tf(m, {0.0, s.omega}) - s.value));
    scale = std::max(scale, std::abs(s.value));
  }
  return scale > 0.0 ? err / scale : err;
}

LddcDesign design_lddc(const FrequencyResponseSet& frf, const LddcOptions& opts) {
  if (opts.order < 0) throw ConfigError("design: order must be >= 0");
  ControllerSamples all = ideal_controller_samples(frf, opts.reference);
  std::vector<FrequencySample> used = all.samples();
  if (used.size() % 2 == 1) used.pop_back();

  LddcDesign d;
  d.samples = ControllerSamples(std::move(used));
  const auto [left, right] = partition(d.samples);
  const LoewnerPencil pencil = build_pencil(left, right);
  d.minimal_order = minimal_order(pencil, opts.rank_tol);
  d.order = opts.order == 0 ? d.minimal_order : opts.order;
  if (d.order > d.minimal_order) {
    throw OrderError("design: requested order " + std::to_string(d.order) +
                     " exceeds minimal order " + std::to_string(d.minimal_order));
  }

  const StateSpaceModel full = realize(pencil, d.minimal_order, opts.rank_tol);
  d.interpolation_residual = interpolation_residual(full, d.samples);
  d.continuous = d.order == d.minimal_order ? full : realize(pencil, d.order, opts.rank_tol);
  d.sampled = discretize(d.continuous, opts.h, opts.method);
  try {
    d.integral_gain = extract_integral_gain(d.sampled, opts.pole_tol);
  } catch (const NotAnIntegratorError&) {
    d.integral_gain.reset();
  }
  return d;
}

}  // namespace flowsep
