#include "flowsep/simloop.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>
#include <variant>

#include "flowsep/errors.hpp"
#include "flowsep/textio.hpp"

namespace flowsep {

double ReferenceSignal::at(double t, double duration) const {
  if (amplitude == 0.0) return r0;
  const double two_pi = 2.0 * std::numbers::pi;
  if (f_max == f_min) return r0 + amplitude * std::sin(two_pi * f_min * t);
  const double K = std::log(f_max / f_min) / duration;
  return r0 + amplitude * std::sin(two_pi * f_min * std::expm1(K * t) / K);
}

double DeltaSchedule::at(double t) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Steps: {
      double d = steps.front().second;
      for (const auto& [ts, v] : steps) {
        if (t >= ts) d = v;
      }
      return d;
    }
    case Kind::Ramp: return std::clamp(start + rate * t, lower, upper);
  }
  return value;
}

void DeltaSchedule::validate() const {
  if (kind == Kind::Steps) {
    if (steps.empty() || steps.front().first != 0.0) {
      throw ConfigError("delta schedule: steps must start at t = 0");
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
      if (!(steps[i].first > steps[i - 1].first)) {
        throw ConfigError("delta schedule: step times must increase");
      }
    }
  }
  if (kind == Kind::Ramp && !(lower <= upper)) throw ConfigError("delta schedule: lower > upper");
}

void Scenario::validate() const {
  if (!(h > 0.0)) throw ConfigError("scenario: h must be > 0");
  if (!(duration > 0.0)) throw ConfigError("scenario: duration must be > 0");
  if (reference.amplitude < 0.0 || reference.r0 - reference.amplitude < 0.0) {
    throw ConfigError("scenario: reference must stay nonnegative");
  }
  if (reference.amplitude > 0.0 &&
      !(reference.f_min > 0.0 && reference.f_min <= reference.f_max &&
        reference.f_max < 0.5 / h)) {
    throw ConfigError("scenario: reference sweep band must lie below the Nyquist rate of h");
  }
  delta.validate();
  controller.validate();
  if (std::abs(controller.h - h) > 1e-12) {
    throw ConfigError("scenario: controller h differs from scenario h");
  }
  plant.validate();
  actuator.validate();
}

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(duration / h));
}

namespace {

struct NoController {};

using AnyController = std::variant<NoController, LinearIntegralController, AICController>;

AnyController make_controller(const ControllerParams& p) {
  if (p.type == "linear") return LinearIntegralController(p.k, p.h, p.scaling(), p.x0);
  if (p.type == "aic") {
    return AICController(p.k, p.eta, p.h, p.mode, p.scaling(), {p.z1_0, p.z2_0});
  }
  return NoController{};
}

}  // namespace

SimulationTrace run_closed_loop(const Scenario& sc) {
  sc.validate();
  const std::size_t n = sc.steps();
  FlapPlant plant(sc.map, sc.plant);
  plant.initialize(sc.delta.at(0.0), sc.h / sc.actuator.N, sc.seed);
  AnyController ctrl = make_controller(sc.controller);

  SimulationTrace tr;
  tr.h = sc.h;
  tr.records.reserve(n);
  double y = plant.current_output();
  for (std::size_t k = 0; k < n; ++k) {
    TraceRecord rec;
    rec.t = static_cast<double>(k) * sc.h;
    rec.r = sc.reference.at(rec.t, sc.duration);
    rec.y = y;
    rec.e = rec.r - y;
    rec.delta = sc.delta.at(rec.t);
    ControlCommand cmd;
    if (auto* lin = std::get_if<LinearIntegralController>(&ctrl)) {
      cmd = lin->step(rec.r, y);
      rec.z1 = lin->state();
    } else if (auto* aic = std::get_if<AICController>(&ctrl)) {
      cmd = aic->step(rec.r, y);
      rec.z1 = aic->state().z1;
      rec.z2 = aic->state().z2;
    }
    rec.u = cmd.u;
    rec.alpha = cmd.alpha;
    rec.saturated = cmd.saturated;
    const PulseTrain pulses = duty_to_pulses(cmd.alpha, sc.h, sc.actuator);
    rec.pulse_mean = pulses.mean();
    if (!std::isfinite(rec.u) || !std::isfinite(rec.z1) || !std::isfinite(rec.z2)) {
      throw DivergenceError("closed loop diverged at step " + std::to_string(k) + " (t = " +
                            std::to_string(rec.t) + " s)");
    }
    tr.records.push_back(rec);
    y = plant.step(rec.delta, pulses);
  }
  return tr;
}

std::vector<SimulationTrace> run_scenarios(const std::vector<Scenario>& scenarios,
                                           unsigned max_threads) {
  if (max_threads == 0) max_threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<SimulationTrace> out(scenarios.size());
  for (std::size_t base = 0; base < scenarios.size(); base += max_threads) {
    const std::size_t end = std::min(scenarios.size(), base + max_threads);
    std::vector<std::future<SimulationTrace>> jobs;
    for (std::size_t i = base; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async, run_closed_loop, std::cref(scenarios[i])));
    }
    for (std::size_t i = base; i < end; ++i) out[i] = jobs[i - base].get();
  }
  return out;
}

std::vector<double> model_matching_error(const SimulationTrace& trace, const ReferenceModel& m) {
  m.validate();
  std::vector<double> eps;
  if (trace.records.empty()) return eps;
  eps.reserve(trace.size());
  const double a = std::exp(-m.omega0 * trace.h);
  double mr = trace.records.front().r;
  for (const auto& rec : trace.records) {
    eps.push_back(mr - rec.y);
    mr = a * mr + (1.0 - a) * rec.r;
  }
  return eps;
}

Scenario scenario_angle_steps(const Scenario& base, double segment) {
  if (!(segment > 0.0)) throw ConfigError("angle steps: segment must be > 0");
  Scenario sc = base;
  sc.name = "angle-steps";
  sc.duration = 3.0 * segment;
  sc.reference.amplitude = 0.0;
  sc.delta.kind = DeltaSchedule::Kind::Steps;
  sc.delta.steps = {{0.0, 8.0}, {segment, 18.0}, {2.0 * segment, 24.0}};
  return sc;
}

Scenario scenario_ramp(const Scenario& base) {
  Scenario sc = base;
  sc.name = "ramp";
  sc.duration = 68.0;
  sc.reference.amplitude = 0.0;
  sc.delta.kind = DeltaSchedule::Kind::Ramp;
  sc.delta.start = 34.0;
  sc.delta.rate = -0.5;
  sc.delta.lower = 0.0;
  sc.delta.upper = 37.0;
  return sc;
}

std::vector<Scenario> scenario_reference_sweep(double f_min, double f_max,
                                               const std::vector<double>& angles,
                                               double amplitude, const Scenario& base,
                                               double duration) {
  std::vector<Scenario> out;
  for (const double d : angles) {
    Scenario sc = base;
    sc.name = "sweep-" + format_double(d);
    sc.duration = duration;
    sc.reference.amplitude = amplitude;
    sc.reference.f_min = f_min;
    sc.reference.f_max = f_max;
    sc.delta.kind = DeltaSchedule::Kind::Constant;
    sc.delta.value = d;
    sc.validate();
    out.push_back(std::move(sc));
  }
  return out;
}

double scan_sweep_amplitude(const std::vector<Scenario>& family,
                            const std::vector<double>& candidates, double min_unsaturated) {
  if (candidates.empty()) throw ConfigError("amplitude scan: no candidates");
  std::vector<double> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (const double a : sorted) {
    std::vector<Scenario> trial = family;
    for (auto& sc : trial) sc.reference.amplitude = a;
    const auto traces = run_scenarios(trial);
    const bool ok = std::all_of(traces.begin(), traces.end(), [&](const SimulationTrace& t) {
      return 1.0 - saturated_fraction(t) >= min_unsaturated;
    });
    if (ok) return a;
  }
  throw NumericalError("amplitude scan: no candidate keeps the duty unsaturated often enough");
}

FrequencyResponseSet closed_loop_frf(const SimulationTrace& trace, double r0,
                                     const ClosedLoopFrfOptions& opts) {
  TimeSeries u, y;
  u.dt = y.dt = trace.h;
  u.values.reserve(trace.size());
  y.values.reserve(trace.size());
  double ym = 0.0;
  for (const auto& rec : trace.records) ym += rec.y;
  ym /= static_cast<double>(std::max<std::size_t>(1, trace.size()));
  for (const auto& rec : trace.records) {
    u.values.push_back(rec.r - r0);
    y.values.push_back(rec.y - ym);
  }
  return estimate_frf(u, y, opts.n_out, opts.band_lo_hz, opts.band_hi_hz, opts.estimator);
}

double recovery_time(const SimulationTrace& trace, double event_t, double tol, double hold) {
  if (trace.records.empty()) throw ConfigError("recovery_time: empty trace");
  const double t_end = trace.records.back().t;
  if (event_t < trace.records.front().t || event_t > t_end) {
    throw RangeError("recovery_time: event outside trace");
  }
  const auto i0 = static_cast<std::size_t>(std::llround(event_t / trace.h));
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hold / trace.h)));
  std::size_t run = 0;
  for (std::size_t i = i0; i < trace.size(); ++i) {
    const auto& rec = trace.records[i];
    run = std::abs(rec.y - rec.r) <= tol ? run + 1 : 0;
    if (run >= m) return static_cast<double>(i + 1 - m - i0) * trace.h;
  }
  return kNeverRecovers;
}

double saturated_fraction(const SimulationTrace& trace) {
  if (trace.records.empty()) return 0.0;
  const auto n = std::count_if(trace.records.begin(), trace.records.end(),
                               [](const TraceRecord& r) { return r.saturated; });
  return static_cast<double>(n) / static_cast<double>(trace.size());
}

bool aic_states_reproduce(const SimulationTrace& trace, const ControllerParams& params) {
  AicState z{params.z1_0, params.z2_0};
  for (const auto& rec : trace.records) {
    z = AICController::update(z, rec.r, rec.y, params.eta, params.h, params.mode);
    if (z.z1 != rec.z1 || z.z2 != rec.z2) return false;
  }
  return true;
}

SteadyDutyFn make_steady_duty_probe(const Scenario& base, double settle, double window,
                                    double tol) {
  return [=](double delta) {
    Scenario sc = base;
    sc.name = "steady-" + format_double(delta);
    sc.duration = settle + window;
    sc.reference.amplitude = 0.0;
    sc.delta.kind = DeltaSchedule::Kind::Constant;
    sc.delta.value = delta;
    const SimulationTrace tr = run_closed_loop(sc);
    const auto first = static_cast<std::size_t>(std::llround(settle / sc.h));
    double alpha = 0.0, err = 0.0;
    for (std::size_t i = first; i < tr.size(); ++i) {
      alpha += tr.records[i].alpha;
      err += tr.records[i].e;
    }
    const auto cnt = static_cast<double>(tr.size() - first);
    SteadyDuty s;
    s.mean_alpha = alpha / cnt;
    s.converged = std::abs(err / cnt) <= tol;
    return s;
  };
}

TimeSeries run_open_loop(const TimeSeries& duty, double delta, const PlantParams& plant,
                         const SeparationMap& map, const PFAConfig& actuator, std::uint64_t seed) {
  duty.validate();
  FlapPlant p(map, plant);
  p.initialize(delta, duty.dt / actuator.N, seed);
  TimeSeries y;
  y.t0 = duty.t0;
  y.dt = duty.dt;
  y.values.reserve(duty.size());
  for (const double a : duty.values) {
    y.values.push_back(p.current_output());
    p.step(delta, duty_to_pulses(a, duty.dt, actuator));
  }
  return y;
}

void write_trace_csv(const std::string& path, const SimulationTrace& trace) {
  CsvTable t;
  t.header = {"t", "r", "y", "e", "u", "alpha", "delta", "z1", "z2", "pulse_mean"};
  t.rows.reserve(trace.size());
  for (const auto& r : trace.records) {
    t.rows.push_back({r.t, r.r, r.y, r.e, r.u, r.alpha, r.delta, r.z1, r.z2, r.pulse_mean});
  }
  write_csv(path, t);
}

}  // namespace flowsep
