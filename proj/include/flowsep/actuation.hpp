#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flowsep {

// Pulsed jet actuator. Momentum quantities form a calibration bundle: with the
// defaults below, momentum_coefficient() at 34.5 m/s and 1.2 kg/m^3 is 0.016.
struct PFAConfig {
  double f = 100.0;       // PWM frequency, Hz
  int N = 100;            // substeps per control period
  double q_jet = 0.021;   // kg/s
  double U_jet = 95.76;   // m/s
  double mean_Ujet_sq = 95.76 * 95.76;  // m^2/s^2
  double rho_jet = 1.3924;              // kg/m^3
  double A_jet = 7 * 0.090 * 0.00025;   // m^2, seven 90 mm x 0.25 mm slots
  double A_ref = 0.220 * 0.800;         // m^2, flap chord x span between panels

  void validate() const;
};

struct PulseTrain {
  double substep_dt = 0.0;
  std::vector<std::uint8_t> states;

  double mean() const;
};

// Leading-edge aligned square wave, on-fraction round(alpha * n)/n per PWM
// period where n = N / (f h) substeps.
PulseTrain duty_to_pulses(double alpha, double h, const PFAConfig& cfg);

// f+ = f c_flap / U_inf.
double reduced_frequency(double f, double c_flap, double U_inf);

// C_mu = q_jet U_jet / (0.5 rho_inf U_inf^2 A_ref).
double momentum_coefficient(const PFAConfig& cfg, double rho_inf, double U_inf);

// <C_mu> = C_mu / alpha.
double mean_momentum_coefficient(double c_mu, double alpha);

// alpha such that mean_momentum_coefficient(c_mu, alpha) == target.
double duty_for_mean_momentum(double c_mu, double target_mean_c_mu);

// CSV `t,state`.
void write_pulse_train_csv(const std::string& path, const PulseTrain& p, double t0 = 0.0);

}  // namespace flowsep
