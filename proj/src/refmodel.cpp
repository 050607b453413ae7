#include "flowsep/refmodel.hpp"

#include <cmath>
#include <sstream>

#include "flowsep/errors.hpp"

namespace flowsep {

void ReferenceModel::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw ConfigError("reference model: omega0 must be > 0");
  }
}

cdouble ReferenceModel::eval(cdouble s) const {
  validate();
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
    throw ConfigError("reference model: evaluation point must be finite");
  }
  const cdouble den = s / omega0 + 1.0;
  if (den == 0.0) throw PoleEvaluationError("reference model evaluated at its pole s = -omega0");
  return 1.0 / den;
}

cdouble ReferenceModel::complement(cdouble s) const {
  const cdouble x = s / omega0;
  const cdouble den = x + 1.0;
  if (den == 0.0) throw PoleEvaluationError("reference model evaluated at its pole s = -omega0");
  return x / den;
}

cdouble eval_reference(const ReferenceModel& m, cdouble s) { return m.eval(s); }

ControllerSamples ideal_controller_samples(const FrequencyResponseSet& frf,
                                           const ReferenceModel& m) {
  m.validate();
  std::vector<FrequencySample> out;
  out.reserve(frf.size());
  for (const auto& smp : frf.samples()) {
    if (!(smp.omega > 0.0)) {
      throw ConfigError("ideal controller: omega = 0 sample rejected, 1 - M(0) is singular");
    }
    if (smp.value == 0.0) {
      std::ostringstream msg;
      msg << "ideal controller: singular plant sample at omega = " << smp.omega << " rad/s";
      throw NumericalError(msg.str());
    }
    const cdouble s(0.0, smp.omega);
    out.push_back({smp.omega, m.eval(s) / (m.complement(s) * smp.value)});
  }
  return ControllerSamples(std::move(out));
}

}  // namespace flowsep
