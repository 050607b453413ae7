#pragma once

#include <optional>

#include "flowsep/controllers.hpp"
#include "flowsep/loewner.hpp"
#include "flowsep/refmodel.hpp"

namespace flowsep {

struct LddcOptions {
  ReferenceModel reference;
  double h = 0.01;
  int order = 1;  // 0 selects the minimal order
  double rank_tol = 1e-9;
  DiscretizationMethod method = DiscretizationMethod::Bilinear;
  // The reduced model's slow pole sits near, not on, s = 0.
  double pole_tol = 1e-3;
};

struct LddcDesign {
  ControllerSamples samples;  // K* samples fed to the pencil
  int minimal_order = 0;
  int order = 0;
  StateSpaceModel continuous;  // order-r model
  StateSpaceModel sampled;
  std::optional<double> integral_gain;
  // max_k |K_n(i w_k) - K*_k| / max_k |K*_k| for the minimal-order model.
  double interpolation_residual = 0.0;
};

// Data-driven design chain: FRF -> K* -> Loewner pencil -> K_n and K_r ->
// sampled K_r -> integral gain. An odd sample count drops the highest
// frequency so the pencil is square and K_n interpolates every used sample.
LddcDesign design_lddc(const FrequencyResponseSet& frf, const LddcOptions& opts = {});

// Max relative interpolation error of a model against samples.
double interpolation_residual(const StateSpaceModel& m, const ControllerSamples& samples);

}  // namespace flowsep
