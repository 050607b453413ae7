#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "flowsep/actuation.hpp"
#include "flowsep/controllers.hpp"
#include "flowsep/freqdata.hpp"
#include "flowsep/plant.hpp"
#include "flowsep/refmodel.hpp"

namespace flowsep {

inline constexpr double kReferenceVoltage = 0.3903;

// r(t) = r0 + amplitude * sin(phi(t)), phi a log sweep from f_min to f_max
// spread over the scenario duration.
struct ReferenceSignal {
  double r0 = kReferenceVoltage;
  double amplitude = 0.0;
  double f_min = 0.01;  // Hz
  double f_max = 5.0;   // Hz

  double at(double t, double duration) const;
};

struct DeltaSchedule {
  enum class Kind { Constant, Steps, Ramp };
  Kind kind = Kind::Constant;
  double value = 24.0;                           // Constant
  std::vector<std::pair<double, double>> steps;  // Steps: (t_start, delta), first at t = 0
  double start = 34.0;                           // Ramp
  double rate = -0.5;                            // deg/s
  double lower = 0.0;
  double upper = 37.0;

  double at(double t) const;
  void validate() const;
};

struct Scenario {
  std::string name = "constant";
  double duration = 30.0;  // s
  double h = 0.01;         // s
  ReferenceSignal reference;
  DeltaSchedule delta;
  ControllerParams controller;
  PlantParams plant;
  SeparationMap map;
  PFAConfig actuator;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t steps() const;
};

struct TraceRecord {
  double t = 0.0;
  double r = 0.0;
  double y = 0.0;
  double e = 0.0;
  double u = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double z1 = 0.0;  // AIC z1 after the update; linear accumulator otherwise
  double z2 = 0.0;
  double pulse_mean = 0.0;
  bool saturated = false;
};

struct SimulationTrace {
  double h = 0.01;
  std::vector<TraceRecord> records;

  std::size_t size() const { return records.size(); }
};

SimulationTrace run_closed_loop(const Scenario& sc);

// Runs independent scenarios concurrently; results keep input order.
std::vector<SimulationTrace> run_scenarios(const std::vector<Scenario>& scenarios,
                                           unsigned max_threads = 0);

// eps_k = (M * r)_k - y_k with M discretized by zero-order hold.
std::vector<double> model_matching_error(const SimulationTrace& trace, const ReferenceModel& m);

// 8 deg, 18 deg, 24 deg segments at fixed reference.
Scenario scenario_angle_steps(const Scenario& base = {}, double segment = 30.0);

// 34 deg down to 0 deg at 0.5 deg/s.
Scenario scenario_ramp(const Scenario& base = {});

// One scenario per frozen angle, reference swept about r0 with the given amplitude.
std::vector<Scenario> scenario_reference_sweep(double f_min, double f_max,
                                               const std::vector<double>& angles,
                                               double amplitude, const Scenario& base = {},
                                               double duration = 180.0);

// Largest candidate amplitude (scanned downward) for which every angle keeps
// at least min_unsaturated of its steps off the duty limits.
double scan_sweep_amplitude(const std::vector<Scenario>& family,
                            const std::vector<double>& candidates,
                            double min_unsaturated = 0.9);

struct ClosedLoopFrfOptions {
  std::size_t n_out = 24;
  double band_lo_hz = 0.1 / (2.0 * std::numbers::pi);
  double band_hi_hz = 1.0;
  FrfOptions estimator{8192, 0.5};
};

// FRF from (r - r0) to (y - mean y).
FrequencyResponseSet closed_loop_frf(const SimulationTrace& trace, double r0,
                                     const ClosedLoopFrfOptions& opts = {});

inline constexpr double kNeverRecovers = std::numeric_limits<double>::infinity();

// First time after event_t at which |y - r| stays within tol for hold seconds,
// minus event_t; kNeverRecovers if that never happens inside the trace.
double recovery_time(const SimulationTrace& trace, double event_t, double tol = 0.02,
                     double hold = 2.0);

double saturated_fraction(const SimulationTrace& trace);

// Re-applies the discrete AIC update to the logged (r, y) and compares with
// the logged states bit for bit.
bool aic_states_reproduce(const SimulationTrace& trace, const ControllerParams& params);

// Steady mean duty at a frozen angle, for lift_vs_angle.
SteadyDutyFn make_steady_duty_probe(const Scenario& base, double settle = 40.0,
                                    double window = 10.0, double tol = 0.02);

// Open-loop plant response to a duty-fraction series sampled at the control
// period (duty.dt), frozen flap angle.
TimeSeries run_open_loop(const TimeSeries& duty, double delta, const PlantParams& plant,
                         const SeparationMap& map, const PFAConfig& actuator, std::uint64_t seed);

// CSV `t,r,y,e,u,alpha,delta,z1,z2,pulse_mean`.
void write_trace_csv(const std::string& path, const SimulationTrace& trace);

// Scenario definition, `key=value` with [scenario], [reference], [delta],
// [controller], [plant], [actuator] sections.
Scenario scenario_from_kv(const KeyValueFile& kv);
KeyValueFile scenario_to_kv(const Scenario& sc);
Scenario load_scenario(const std::string& path);

}  // namespace flowsep
