#include "flowsep/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flowsep/errors.hpp"

namespace flowsep {

void FlowConditions::validate() const {
  if (!(U_inf > 0.0 && rho_inf > 0.0 && nu > 0.0 && p_inf > 0.0)) {
    throw ConfigError("flow conditions must be positive");
  }
}

void Geometry::validate() const {
  if (!(c_flap > 0.0 && c_flap < c_tot)) throw ConfigError("geometry: need 0 < c_flap < c_tot");
  if (!(delta_min >= 2.0 && delta_max <= 37.0 && delta_min < delta_max)) {
    throw ConfigError("geometry: flap range must lie within [2, 37] deg");
  }
}

AngleTable::AngleTable(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw ConfigError("angle table needs at least 2 knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].first) || !std::isfinite(knots_[i].second)) {
      throw ConfigError("angle table has non-finite entries");
    }
    if (i > 0 && !(knots_[i].first > knots_[i - 1].first)) {
      throw ConfigError("angle table knots must be strictly increasing");
    }
  }
}

double AngleTable::operator()(double delta) const {
  if (knots_.empty()) throw ConfigError("angle table is empty");
  // Small slack absorbs floating error on schedule endpoints.
  const double slack = 1e-9;
  if (!(delta >= min_angle() - slack && delta <= max_angle() + slack)) {
    std::ostringstream msg;
    msg << "flap angle " << delta << " deg outside table range [" << min_angle() << ", "
        << max_angle() << "]";
    throw RangeError(msg.str());
  }
  delta = std::clamp(delta, min_angle(), max_angle());
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), delta,
                                   [](double d, const auto& k) { return d < k.first; });
  if (it == knots_.end()) return knots_.back().second;
  if (it == knots_.begin()) return knots_.front().second;
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  return y0 + (y1 - y0) * (delta - x0) / (x1 - x0);
}

AngleTable read_angle_table_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const auto dc = t.column("delta_deg");
  const auto vc = t.column("value");
  std::vector<std::pair<double, double>> k;
  for (const auto& r : t.rows) k.emplace_back(r[dc], r[vc]);
  return AngleTable(std::move(k));
}

void write_angle_table_csv(const std::string& path, const AngleTable& table) {
  CsvTable t;
  t.header = {"delta_deg", "value"};
  for (const auto& [d, v] : table.knots()) t.rows.push_back({d, v});
  write_csv(path, t);
}

SeparationMap::SeparationMap()
    : SeparationMap(AngleTable({{0.0, 1.0},
                                {2.0, 1.0},
                                {13.8, 0.3903},
                                {20.0, 0.35},
                                {26.0, 0.37},
                                {32.0, 0.0},
                                {37.0, 0.1}})) {}

SeparationMap::SeparationMap(AngleTable table) : table_(std::move(table)) {
  for (const auto& [d, v] : table_.knots()) {
    if (v < 0.0 || v > 1.0) throw ConfigError("separation map values must lie in [0, 1]");
  }
}

double unforced_voltage(const SeparationMap& map, double delta) { return map(delta); }

void PlantParams::validate() const {
  if (!(g0_duty > 0.0)) throw ConfigError("plant: g0_duty must be > 0");
  if (!(omega_p > 0.0)) throw ConfigError("plant: omega_p must be > 0");
  if (!(tau >= 0.0)) throw ConfigError("plant: tau must be >= 0");
  if (!(fast_fraction >= 0.0 && fast_fraction <= 1.0)) {
    throw ConfigError("plant: fast_fraction must be in [0, 1]");
  }
  if (!(noise_std >= 0.0)) throw ConfigError("plant: noise_std must be >= 0");
}

PlantParams PlantParams::from_kv(const KeyValueFile& kv, const std::string& section) {
  PlantParams p;
  p.g0_duty = kv.get_double(section, "g0_duty", p.g0_duty);
  p.omega_p = kv.get_double(section, "omega_p", p.omega_p);
  p.tau = kv.get_double(section, "tau", p.tau);
  p.fast_fraction = kv.get_double(section, "fast_fraction", p.fast_fraction);
  p.noise_std = kv.get_double(section, "noise_std", p.noise_std);
  p.validate();
  return p;
}

void PlantParams::to_kv(KeyValueFile& kv, const std::string& section) const {
  kv.set(section, "g0_duty", format_double(g0_duty));
  kv.set(section, "omega_p", format_double(omega_p));
  kv.set(section, "tau", format_double(tau));
  kv.set(section, "fast_fraction", format_double(fast_fraction));
  kv.set(section, "noise_std", format_double(noise_std));
}

FlapPlant::FlapPlant(SeparationMap map, PlantParams params)
    : map_(std::move(map)), params_(params) {
  params_.validate();
}

void FlapPlant::initialize(double delta, double substep_dt, std::uint64_t seed) {
  if (!(substep_dt > 0.0)) throw ConfigError("plant: substep dt must be > 0");
  substep_dt_ = substep_dt;
  const double wdt = params_.omega_p * substep_dt;
  decay_ = std::exp(-wdt);
  avg_gain_ = -std::expm1(-wdt) / wdt;
  slow_ = 0.0;
  delay_.assign(static_cast<std::size_t>(std::llround(params_.tau / substep_dt)), 0);
  delay_pos_ = 0;
  rng_.seed(seed);
  noise_.reset();
  y_ = map_(delta);
  initialized_ = true;
}

double FlapPlant::step(double delta, const PulseTrain& pulses) {
  if (!initialized_) throw ConfigError("plant: step before initialize");
  if (pulses.states.empty()) throw ConfigError("plant: empty pulse train");
  if (std::abs(pulses.substep_dt - substep_dt_) > 1e-12 * substep_dt_) {
    throw ConfigError("plant: pulse substep differs from plant substep");
  }
  const double base = map_(delta);
  const double g0 = params_.g0_duty;
  const double rho = params_.fast_fraction;
  double acc = 0.0;
  for (const std::uint8_t s : pulses.states) {
    std::uint8_t q = s;
    if (!delay_.empty()) {
      std::swap(q, delay_[delay_pos_]);
      delay_pos_ = (delay_pos_ + 1) % delay_.size();
    }
    const double in = g0 * q;
    // Exact substep average of the slow first-order state under constant input.
    const double avg = in + (slow_ - in) * avg_gain_;
    slow_ = in + (slow_ - in) * decay_;
    acc += rho * in + (1.0 - rho) * avg;
  }
  double y = base + acc / static_cast<double>(pulses.states.size());
  if (params_.noise_std > 0.0) y += params_.noise_std * noise_(rng_);
  y_ = std::clamp(y, 0.0, 1.0);
  return y_;
}

double FlapPlant::current_output() const {
  if (!initialized_) throw ConfigError("plant: output requested before initialize");
  return y_;
}

double plant_step(FlapPlant& p, double delta, const PulseTrain& pulses) {
  return p.step(delta, pulses);
}

double pressure_coefficient(double p, const FlowConditions& fc) {
  if (!(fc.U_inf > 0.0)) throw ConfigError("pressure_coefficient: U_inf must be > 0");
  return (p - fc.p_inf) / (0.5 * fc.rho_inf * fc.U_inf * fc.U_inf);
}

double lift_coefficient(const PressureDistribution& d) {
  if (d.size() < 2) throw ConfigError("lift_coefficient: need at least 2 stations");
  if (d.front().x != 0.0 || d.back().x != 1.0) {
    throw ConfigError("lift_coefficient: stations must span [0, 1]");
  }
  double cl = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    const double dx = d[i].x - d[i - 1].x;
    if (!(dx > 0.0)) throw ConfigError("lift_coefficient: stations must be strictly increasing");
    const double f0 = d[i - 1].cp_lower - d[i - 1].cp_upper;
    const double f1 = d[i].cp_lower - d[i].cp_upper;
    cl += 0.5 * dx * (f0 + f1);
  }
  return cl;
}

double reynolds(const FlowConditions& fc, const Geometry& g) { return fc.U_inf * g.c_tot / fc.nu; }

LiftModel LiftModel::surrogate_default() {
  LiftModel m;
  m.uncontrolled = AngleTable({{0.0, 0.48},
                               {2.0, 0.60},
                               {12.0, 1.20},
                               {16.0, 1.36},
                               {20.0, 1.44},
                               {26.0, 1.46},
                               {30.0, 1.52},
                               {34.0, 1.64},
                               {37.0, 1.76}});
  return m;
}

std::vector<LiftCurvePoint> lift_vs_angle(const LiftModel& model, const std::vector<double>& angles,
                                          const SteadyDutyFn& steady) {
  std::vector<LiftCurvePoint> out;
  out.reserve(angles.size());
  for (const double d : angles) {
    LiftCurvePoint p;
    p.delta = d;
    p.cl = model.uncontrolled(d);
    if (steady) {
      const SteadyDuty s = steady(d);
      p.mean_alpha = s.mean_alpha;
      p.converged = s.converged;
      p.cl += model.lift_per_duty * s.mean_alpha;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace flowsep
