#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flowsep/actuation.hpp"
#include "flowsep/textio.hpp"

namespace flowsep {

struct FlowConditions {
  double U_inf = 34.5;     // m/s
  double rho_inf = 1.2;    // kg/m^3
  double nu = 1.569e-5;    // m^2/s
  double p_inf = 101325.;  // Pa

  void validate() const;
};

struct Geometry {
  double c_flap = 0.220;  // m
  double c_tot = 1.087;   // m
  double delta_min = 2.0;   // deg
  double delta_max = 37.0;  // deg

  void validate() const;
};

// Rig facts kept for reference; no equation uses them.
namespace rig {
inline constexpr double turbulence_level = 0.013;
inline constexpr int pressure_taps = 51;
inline constexpr int hot_films = 8;
inline constexpr int slot_count = 7;
inline constexpr double slot_length = 0.090;       // m
inline constexpr double slot_width = 0.00025;      // m
inline constexpr double slot_spacing = 0.007;      // m
inline constexpr double slot_inclination_deg = 30.0;
inline constexpr double slot_span_coverage = 0.8;
inline constexpr double panel_spacing = 0.800;     // m
inline constexpr double sampling_rate = 1250.0;    // Hz
}  // namespace rig

// Piecewise-linear table over flap angle, knots strictly increasing.
class AngleTable {
 public:
  AngleTable() = default;
  explicit AngleTable(std::vector<std::pair<double, double>> knots);

  double operator()(double delta) const;
  double min_angle() const { return knots_.front().first; }
  double max_angle() const { return knots_.back().first; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

// CSV `delta_deg,value`.
AngleTable read_angle_table_csv(const std::string& path);
void write_angle_table_csv(const std::string& path, const AngleTable& t);

// Normalized unforced hot-film voltage vs flap angle.
class SeparationMap {
 public:
  SeparationMap();  // surrogate default knots
  explicit SeparationMap(AngleTable table);

  double operator()(double delta) const { return table_(delta); }
  const AngleTable& table() const { return table_; }

 private:
  AngleTable table_;
};

double unforced_voltage(const SeparationMap& map, double delta);

struct PlantParams {
  // DC hot-film gain per unit duty, tuned so the data-driven design lands on
  // an integral gain of 66.19 with 100 command units per duty.
  double g0_duty = 2.0 * std::numbers::pi * 0.01 * 100.0 / 66.19;
  double omega_p = 1.0;        // rad/s, slow pole
  double tau = 0.05;           // s, dead time
  double fast_fraction = 0.7;  // share of g0 that bypasses the slow pole
  double noise_std = 0.005;

  void validate() const;
  static PlantParams from_kv(const KeyValueFile& kv, const std::string& section = "plant");
  void to_kv(KeyValueFile& kv, const std::string& section = "plant") const;
};

// y = clamp01(U*(delta) + G(s) e^{-tau s} g0 pulses + noise),
// G(s) = rho + (1 - rho)/(s/omega_p + 1), averaged over each control period.
class FlapPlant {
 public:
  FlapPlant(SeparationMap map, PlantParams params);

  // Zero actuation history, output at the unforced level, RNG reseeded.
  void initialize(double delta, double substep_dt, std::uint64_t seed);
  bool initialized() const { return initialized_; }

  // Advances one control period (pulses.states.size() substeps).
  double step(double delta, const PulseTrain& pulses);
  double current_output() const;

  const SeparationMap& map() const { return map_; }
  const PlantParams& params() const { return params_; }

 private:
  SeparationMap map_;
  PlantParams params_;
  bool initialized_ = false;
  double substep_dt_ = 0.0;
  double decay_ = 0.0;      // exp(-omega_p dt)
  double avg_gain_ = 0.0;   // (1 - decay)/(omega_p dt)
  double slow_ = 0.0;
  std::vector<std::uint8_t> delay_;
  std::size_t delay_pos_ = 0;
  double y_ = 0.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

double plant_step(FlapPlant& p, double delta, const PulseTrain& pulses);

// C_p = (p - p_inf) / (0.5 rho U^2).
double pressure_coefficient(double p, const FlowConditions& fc);

struct PressureStation {
  double x = 0.0;  // x / c_tot
  double cp_lower = 0.0;
  double cp_upper = 0.0;
};

using PressureDistribution = std::vector<PressureStation>;

// Trapezoidal integral of (cp_lower - cp_upper) over x in [0, 1].
double lift_coefficient(const PressureDistribution& d);

// Re = U_inf c_tot / nu.
double reynolds(const FlowConditions& fc, const Geometry& g);

struct LiftModel {
  AngleTable uncontrolled;  // surrogate lift curve
  double lift_per_duty = 0.565;

  static LiftModel surrogate_default();
};

struct SteadyDuty {
  double mean_alpha = 0.0;
  bool converged = true;
};

using SteadyDutyFn = std::function<SteadyDuty(double delta)>;

struct LiftCurvePoint {
  double delta = 0.0;
  double cl = 0.0;
  double mean_alpha = 0.0;
  bool converged = true;
};

// Uncontrolled curve when steady is empty; otherwise adds lift_per_duty times
// the steady mean duty reported for each angle.
std::vector<LiftCurvePoint> lift_vs_angle(const LiftModel& model, const std::vector<double>& angles,
                                          const SteadyDutyFn& steady = {});

}  // namespace flowsep
