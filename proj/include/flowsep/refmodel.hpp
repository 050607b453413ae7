#pragma once

#include <numbers>

#include "flowsep/freqdata.hpp"

namespace flowsep {

// First-order reference model M(s) = 1/(s/omega0 + 1).
struct ReferenceModel {
  double omega0 = 2.0 * std::numbers::pi;  // rad/s

  void validate() const;
  cdouble eval(cdouble s) const;
  // 1 - M(s), formed as (s/omega0)/(s/omega0 + 1) to avoid cancellation.
  cdouble complement(cdouble s) const;
};

cdouble eval_reference(const ReferenceModel& m, cdouble s);

// K*(i w_k) samples, same layout as an FRF.
using ControllerSamples = FrequencyResponseSet;

// K*_k = Phi_k^-1 M(i w_k) / (1 - M(i w_k)).
ControllerSamples ideal_controller_samples(const FrequencyResponseSet& frf,
                                           const ReferenceModel& m);

}  // namespace flowsep
