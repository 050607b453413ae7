#include "flowsep/actuation.hpp"

#include <cmath>
#include <numeric>

#include "flowsep/errors.hpp"
#include "flowsep/textio.hpp"

namespace flowsep {

void PFAConfig::validate() const {
  if (!(f > 0.0)) throw ConfigError("actuator: f must be > 0");
  if (N < 2) throw ConfigError("actuator: N must be >= 2");
  if (!(q_jet > 0.0 && U_jet > 0.0 && mean_Ujet_sq > 0.0 && rho_jet > 0.0 && A_jet > 0.0 &&
        A_ref > 0.0)) {
    throw ConfigError("actuator: physical quantities must be > 0");
  }
}

double PulseTrain::mean() const {
  if (states.empty()) return 0.0;
  const auto on = std::accumulate(states.begin(), states.end(), 0u,
                                  [](unsigned acc, std::uint8_t s) { return acc + s; });
  return static_cast<double>(on) / static_cast<double>(states.size());
}

PulseTrain duty_to_pulses(double alpha, double h, const PFAConfig& cfg) {
  cfg.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw RangeError("duty_to_pulses: alpha outside [0, 1]");
  if (!(h > 0.0)) throw ConfigError("duty_to_pulses: h must be > 0");
  const double periods = cfg.f * h;
  const auto np = std::llround(periods);
  if (np < 1 || std::abs(periods - static_cast<double>(np)) > 1e-9 * periods) {
    throw ConfigError("duty_to_pulses: f*h must be a positive integer number of PWM periods");
  }
  if (cfg.N % np != 0) {
    throw ConfigError("duty_to_pulses: substeps per step must divide evenly into PWM periods");
  }
  const auto per = static_cast<std::size_t>(cfg.N / np);
  const auto on = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(per)));
  PulseTrain p;
  p.substep_dt = h / cfg.N;
  p.states.resize(static_cast<std::size_t>(cfg.N));
  for (std::size_t i = 0; i < p.states.size(); ++i) p.states[i] = (i % per) < on ? 1 : 0;
  return p;
}

double reduced_frequency(double f, double c_flap, double U_inf) { return f * c_flap / U_inf; }

double momentum_coefficient(const PFAConfig& cfg, double rho_inf, double U_inf) {
  return cfg.q_jet * cfg.U_jet / (0.5 * rho_inf * U_inf * U_inf * cfg.A_ref);
}

double mean_momentum_coefficient(double c_mu, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw RangeError("mean_momentum_coefficient: alpha must be in (0, 1]");
  }
  return c_mu / alpha;
}

double duty_for_mean_momentum(double c_mu, double target_mean_c_mu) {
  if (!(target_mean_c_mu > 0.0)) throw RangeError("target mean momentum must be > 0");
  return c_mu / target_mean_c_mu;
}

void write_pulse_train_csv(const std::string& path, const PulseTrain& p, double t0) {
  CsvTable t;
  t.header = {"t", "state"};
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    t.rows.push_back({t0 + static_cast<double>(i) * p.substep_dt, static_cast<double>(p.states[i])});
  }
  write_csv(path, t);
}

}  // namespace flowsep
