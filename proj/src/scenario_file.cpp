#include <sstream>

#include "flowsep/errors.hpp"
#include "flowsep/simloop.hpp"

namespace flowsep {
namespace {

// "0:8,30:18,60:24" -> {(0,8),(30,18),(60,24)}
std::vector<std::pair<double, double>> parse_steps(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("delta steps: expected t:delta, got '" + item + "'");
    const auto kv = KeyValueFile::parse("t=" + item.substr(0, colon) + "\nd=" + item.substr(colon + 1));
    out.emplace_back(kv.get_double("", "t", 0.0), kv.get_double("", "d", 0.0));
  }
  return out;
}

std::string format_steps(const std::vector<std::pair<double, double>>& steps) {
  std::string out;
  for (const auto& [t, d] : steps) {
    if (!out.empty()) out += ",";
    out += format_double(t) + ":" + format_double(d);
  }
  return out;
}

const char* kind_name(DeltaSchedule::Kind k) {
  switch (k) {
    case DeltaSchedule::Kind::Constant: return "constant";
    case DeltaSchedule::Kind::Steps: return "steps";
    case DeltaSchedule::Kind::Ramp: return "ramp";
  }
  return "constant";
}

}  // namespace

Scenario scenario_from_kv(const KeyValueFile& kv) {
  Scenario sc;
  sc.name = kv.get_string("scenario", "name", sc.name);
  sc.duration = kv.get_double("scenario", "duration", sc.duration);
  sc.h = kv.get_double("scenario", "h", sc.h);
  const long long seed = kv.get_int("scenario", "seed", static_cast<long long>(sc.seed));
  if (seed < 0) throw ConfigError("scenario: seed must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);

  auto& ref = sc.reference;
  ref.r0 = kv.get_double("reference", "r0", ref.r0);
  ref.amplitude = kv.get_double("reference", "amplitude", ref.amplitude);
  ref.f_min = kv.get_double("reference", "f_min", ref.f_min);
  ref.f_max = kv.get_double("reference", "f_max", ref.f_max);

  auto& d = sc.delta;
  const std::string kind = kv.get_string("delta", "kind", "constant");
  if (kind == "constant") {
    d.kind = DeltaSchedule::Kind::Constant;
  } else if (kind == "steps") {
    d.kind = DeltaSchedule::Kind::Steps;
  } else if (kind == "ramp") {
    d.kind = DeltaSchedule::Kind::Ramp;
  } else {
    throw ConfigError("delta kind must be constant, steps or ramp (got '" + kind + "')");
  }
  d.value = kv.get_double("delta", "value", d.value);
  if (const auto s = kv.get("delta", "steps")) d.steps = parse_steps(*s);
  d.start = kv.get_double("delta", "start", d.start);
  d.rate = kv.get_double("delta", "rate", d.rate);
  d.lower = kv.get_double("delta", "lower", d.lower);
  d.upper = kv.get_double("delta", "upper", d.upper);

  KeyValueFile ctrl = kv;
  if (!kv.has("controller", "h")) ctrl.set("controller", "h", format_double(sc.h));
  sc.controller = ControllerParams::from_kv(ctrl, "controller");
  sc.plant = PlantParams::from_kv(kv, "plant");
  if (const auto path = kv.get("plant", "map")) sc.map = SeparationMap(read_angle_table_csv(*path));
  if (const auto knots = kv.get("plant", "map_knots")) {
    sc.map = SeparationMap(AngleTable(parse_steps(*knots)));
  }

  sc.actuator.f = kv.get_double("actuator", "f", sc.actuator.f);
  sc.actuator.N = static_cast<int>(kv.get_int("actuator", "N", sc.actuator.N));
  sc.validate();
  return sc;
}

KeyValueFile scenario_to_kv(const Scenario& sc) {
  KeyValueFile kv;
  kv.set("scenario", "name", sc.name);
  kv.set("scenario", "duration", format_double(sc.duration));
  kv.set("scenario", "h", format_double(sc.h));
  kv.set("scenario", "seed", std::to_string(sc.seed));
  kv.set("reference", "r0", format_double(sc.reference.r0));
  kv.set("reference", "amplitude", format_double(sc.reference.amplitude));
  kv.set("reference", "f_min", format_double(sc.reference.f_min));
  kv.set("reference", "f_max", format_double(sc.reference.f_max));
  kv.set("delta", "kind", kind_name(sc.delta.kind));
  kv.set("delta", "value", format_double(sc.delta.value));
  if (!sc.delta.steps.empty()) kv.set("delta", "steps", format_steps(sc.delta.steps));
  kv.set("delta", "start", format_double(sc.delta.start));
  kv.set("delta", "rate", format_double(sc.delta.rate));
  kv.set("delta", "lower", format_double(sc.delta.lower));
  kv.set("delta", "upper", format_double(sc.delta.upper));
  sc.controller.to_kv(kv, "controller");
  sc.plant.to_kv(kv, "plant");
  kv.set("plant", "map_knots", format_steps(sc.map.table().knots()));
  kv.set("actuator", "f", format_double(sc.actuator.f));
  kv.set("actuator", "N", std::to_string(sc.actuator.N));
  return kv;
}

Scenario load_scenario(const std::string& path) { return scenario_from_kv(KeyValueFile::load(path)); }

}  // namespace flowsep
