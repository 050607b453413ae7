#include "flowsep/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "flowsep/errors.hpp"
#include "flowsep/lddc.hpp"
#include "flowsep/simloop.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace flowsep {

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read '" + path + "' for hashing");
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 14];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

struct Common {
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string mode;
  int order = 1;
};

// Collects what a command read and wrote, then emits manifest.json.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args, const Common& c)
      : out_dir_(c.out_dir) {
    doc_["command"] = std::move(command);
    doc_["args"] = std::move(args);
    doc_["seed"] = c.seed;
    doc_["tool_version"] = FLOWSEP_VERSION;
    doc_["config"] = json::object();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
  }

  void config(const KeyValueFile& kv) {
    for (const auto& s : kv.sections()) {
      for (const auto& [k, v] : kv.entries(s)) doc_["config"][s.empty() ? "_" : s][k] = v;
    }
  }
  void config(const std::string& key, const std::string& value) { doc_["config"]["_"][key] = value; }
  void input(const std::string& path) {
    doc_["inputs"].push_back({{"path", path}, {"digest", file_digest(path)}});
  }
  std::string output(const std::string& name) {
    const std::string path = (fs::path(out_dir_) / name).string();
    outputs_.push_back(name);
    return path;
  }
  void metrics(json m) { doc_["metrics"] = std::move(m); }

  void write() {
    for (const auto& name : outputs_) {
      doc_["outputs"].push_back(
          {{"file", name}, {"digest", file_digest((fs::path(out_dir_) / name).string())}});
    }
    std::ofstream f(fs::path(out_dir_) / "manifest.json");
    if (!f) throw ConfigError("cannot write manifest in '" + out_dir_ + "'");
    f << doc_.dump(2) << "\n";
  }

 private:
  std::string out_dir_;
  std::vector<std::string> outputs_;
  json doc_;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

SweepConfig sweep_from_kv(const KeyValueFile& kv, SweepConfig c = {}) {
  c.f_min = kv.get_double("sweep", "f_min", c.f_min);
  c.f_max = kv.get_double("sweep", "f_max", c.f_max);
  c.duration = kv.get_double("sweep", "duration", c.duration);
  c.fs = kv.get_double("sweep", "fs", c.fs);
  c.amplitude = kv.get_double("sweep", "amplitude", c.amplitude);
  c.offset = kv.get_double("sweep", "offset", c.offset);
  c.validate();
  return c;
}

void sweep_to_kv(const SweepConfig& c, KeyValueFile& kv) {
  kv.set("sweep", "f_min", format_double(c.f_min));
  kv.set("sweep", "f_max", format_double(c.f_max));
  kv.set("sweep", "duration", format_double(c.duration));
  kv.set("sweep", "fs", format_double(c.fs));
  kv.set("sweep", "amplitude", format_double(c.amplitude));
  kv.set("sweep", "offset", format_double(c.offset));
}

KeyValueFile load_optional(const std::string& path) {
  return path.empty() ? KeyValueFile::parse("", "<defaults>") : KeyValueFile::load(path);
}

json trace_metrics(const Scenario& sc, const SimulationTrace& tr) {
  json m;
  m["scenario"] = sc.name;
  m["controller"] = sc.controller.type;
  m["steps"] = tr.size();
  m["saturated_fraction"] = saturated_fraction(tr);
  double alpha = 0.0;
  for (const auto& r : tr.records) alpha += r.alpha;
  m["mean_alpha"] = alpha / static_cast<double>(std::max<std::size_t>(1, tr.size()));
  const auto tail = std::min<std::size_t>(tr.size(), static_cast<std::size_t>(std::llround(5.0 / tr.h)));
  double emax = 0.0;
  for (std::size_t i = tr.size() - tail; i < tr.size(); ++i) {
    emax = std::max(emax, std::abs(tr.records[i].e));
  }
  m["final_5s_max_abs_error"] = emax;
  const auto eps = model_matching_error(tr, ReferenceModel{});
  double ss = 0.0;
  for (const double e : eps) ss += e * e;
  m["model_matching_rms"] = std::sqrt(ss / static_cast<double>(std::max<std::size_t>(1, eps.size())));
  if (sc.delta.kind == DeltaSchedule::Kind::Steps) {
    json ev = json::array();
    for (std::size_t i = 1; i < sc.delta.steps.size(); ++i) {
      const double t = sc.delta.steps[i].first;
      if (t > tr.records.back().t) break;
      ev.push_back({{"event_t", t},
                    {"delta", sc.delta.steps[i].second},
                    {"recovery_time", finite_or_null(recovery_time(tr, t))}});
    }
    m["recovery"] = ev;
  }
  return m;
}

void apply_mode(Scenario& sc, const Common& c) {
  if (c.mode.empty()) return;
  if (c.mode != "linear" && c.mode != "aic") {
    throw ConfigError("--mode must be linear or aic (got '" + c.mode + "')");
  }
  sc.controller.type = c.mode;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& args, std::ostream& out) {
  ensure_dir(c.out_dir);
  Manifest mf("sweep", args, c);
  const KeyValueFile kv = load_optional(c.config);
  if (!c.config.empty()) mf.input(c.config);
  const SweepConfig cfg = sweep_from_kv(kv);
  KeyValueFile resolved;
  sweep_to_kv(cfg, resolved);
  mf.config(resolved);
  const TimeSeries ts = generate_log_sweep(cfg);
  write_time_series_csv(mf.output("sweep.csv"), ts);
  mf.metrics({{"samples", ts.size()}});
  mf.write();
  out << "sweep: " << ts.size() << " samples written to " << c.out_dir << "\n";
  return 0;
}

int cmd_openloop(const Common& c, const std::vector<std::string>& args, double delta,
                 std::ostream& out) {
  ensure_dir(c.out_dir);
  Manifest mf("openloop", args, c);
  const KeyValueFile kv = load_optional(c.config);
  if (!c.config.empty()) mf.input(c.config);
  const double h = kv.get_double("openloop", "h", 0.01);
  const double cpd = kv.get_double("openloop", "command_per_duty", 100.0);
  delta = kv.get_double("openloop", "delta", delta);
  SweepConfig base;
  base.fs = 1.0 / h;
  const SweepConfig cfg = sweep_from_kv(kv, base);
  if (std::abs(cfg.fs * h - 1.0) > 1e-9) throw ConfigError("openloop: sweep fs must equal 1/h");
  const PlantParams plant = PlantParams::from_kv(kv, "plant");
  PFAConfig act;
  act.N = static_cast<int>(kv.get_int("actuator", "N", act.N));
  act.f = kv.get_double("actuator", "f", act.f);

  KeyValueFile resolved;
  sweep_to_kv(cfg, resolved);
  plant.to_kv(resolved, "plant");
  resolved.set("openloop", "h", format_double(h));
  resolved.set("openloop", "delta", format_double(delta));
  resolved.set("openloop", "command_per_duty", format_double(cpd));
  resolved.set("actuator", "N", std::to_string(act.N));
  resolved.set("actuator", "f", format_double(act.f));
  mf.config(resolved);

  const TimeSeries duty = generate_log_sweep(cfg);
  const TimeSeries y = run_open_loop(duty, delta, plant, SeparationMap{}, act, c.seed);
  TimeSeries u = duty;
  for (auto& v : u.values) v *= cpd;
  write_time_series_csv(mf.output("duty.csv"), duty);
  write_time_series_csv(mf.output("u.csv"), u);
  write_time_series_csv(mf.output("y.csv"), y);
  mf.write();
  out << "openloop: " << y.size() << " samples at delta = " << delta << " deg\n";
  return 0;
}

struct IdentifyOpts {
  std::string u_path, y_path;
  std::size_t n_out = 32;
  double f_lo = 0.01, f_hi = 5.0;
  std::size_t segment = 8192;
};

int cmd_identify(const Common& c, const std::vector<std::string>& args, const IdentifyOpts& o,
                 std::ostream& out) {
  ensure_dir(c.out_dir);
  Manifest mf("identify", args, c);
  const TimeSeries u = read_time_series_csv(o.u_path);
  const TimeSeries y = read_time_series_csv(o.y_path);
  mf.input(o.u_path);
  mf.input(o.y_path);
  mf.config("n_out", std::to_string(o.n_out));
  mf.config("f_lo", format_double(o.f_lo));
  mf.config("f_hi", format_double(o.f_hi));
  mf.config("segment", std::to_string(o.segment));
  const FrequencyResponseSet frf = estimate_frf(u, y, o.n_out, o.f_lo, o.f_hi, {o.segment, 0.5});
  write_frf_csv(mf.output("frf.csv"), frf);
  mf.metrics({{"points", frf.size()}});
  mf.write();
  out << "identify: " << frf.size() << " frequency points\n";
  return 0;
}

struct DesignOpts {
  std::string frf_path;
  double omega0 = 2.0 * std::numbers::pi;
  double h = 0.01;
  std::string method = "bilinear";
  double tol = 1e-9;
};

int cmd_design(const Common& c, const std::vector<std::string>& args, const DesignOpts& o,
               std::ostream& out, std::ostream& err) {
  ensure_dir(c.out_dir);
  Manifest mf("design-lddc", args, c);
  const FrequencyResponseSet frf = read_frf_csv(o.frf_path);
  mf.input(o.frf_path);
  LddcOptions opts;
  opts.reference.omega0 = o.omega0;
  opts.h = o.h;
  opts.order = c.order;
  opts.rank_tol = o.tol;
  opts.method = parse_discretization(o.method);
  mf.config("omega0", format_double(o.omega0));
  mf.config("h", format_double(o.h));
  mf.config("order", std::to_string(c.order));
  mf.config("method", o.method);
  mf.config("tol", format_double(o.tol));

  const LddcDesign d = design_lddc(frf, opts);
  write_frf_csv(mf.output("kstar.csv"), d.samples);
  save_model(mf.output("model_continuous.txt"), d.continuous);
  save_model(mf.output("model_sampled.txt"), d.sampled);
  json metrics = {{"samples_used", d.samples.size()},
                  {"minimal_order", d.minimal_order},
                  {"order", d.order},
                  {"interpolation_residual", d.interpolation_residual},
                  {"integral_gain", d.integral_gain ? json(*d.integral_gain) : json(nullptr)}};
  {
    std::ofstream rep(mf.output("report.txt"));
    rep << std::setprecision(17);
    rep << "samples_used=" << d.samples.size() << "\n";
    rep << "minimal_order=" << d.minimal_order << "\n";
    rep << "order=" << d.order << "\n";
    rep << "interpolation_residual=" << d.interpolation_residual << "\n";
    if (d.integral_gain) rep << "integral_gain=" << *d.integral_gain << "\n";
  }
  if (d.integral_gain) {
    ControllerParams p;
    p.type = "linear";
    p.k = *d.integral_gain;
    p.h = o.h;
    KeyValueFile kv;
    p.to_kv(kv);
    std::ofstream f(mf.output("controller.txt"));
    f << kv.to_string();
  } else {
    err << "design-lddc: order-" << d.order << " model has no pole at z = 1; no controller file\n";
  }
  mf.metrics(metrics);
  mf.write();
  out << "design-lddc: n = " << d.minimal_order << ", r = " << d.order
      << ", residual = " << d.interpolation_residual;
  if (d.integral_gain) out << ", k = " << *d.integral_gain;
  out << "\n";
  return 0;
}

struct SimulateOpts {
  std::string preset;
  double amplitude = 0.0;  // sweep family; 0 runs the downward scan
};

int cmd_simulate(const Common& c, const std::vector<std::string>& args, const SimulateOpts& o,
                 std::ostream& out) {
  ensure_dir(c.out_dir);
  Manifest mf("simulate", args, c);
  Scenario base;
  if (!c.config.empty()) {
    base = load_scenario(c.config);
    mf.input(c.config);
  } else if (o.preset.empty()) {
    throw ConfigError("simulate: need --config or --preset");
  }
  if (c.seed_given) base.seed = c.seed;
  apply_mode(base, c);

  std::vector<Scenario> family;
  if (o.preset.empty() || o.preset == "constant") {
    family.push_back(base);
  } else if (o.preset == "angle-steps") {
    family.push_back(scenario_angle_steps(base));
  } else if (o.preset == "ramp") {
    family.push_back(scenario_ramp(base));
  } else if (o.preset == "sweep-family") {
    family = scenario_reference_sweep(0.01, 5.0, {16.0, 18.0, 20.0, 22.0, 24.0}, 0.01, base);
    const double a = o.amplitude > 0.0
                         ? o.amplitude
                         : scan_sweep_amplitude(family, {0.05, 0.04, 0.03, 0.02, 0.015, 0.01,
                                                         0.0075, 0.005});
    for (auto& sc : family) sc.reference.amplitude = a;
  } else {
    throw ConfigError("unknown preset '" + o.preset + "'");
  }
  for (const auto& sc : family) sc.validate();

  const auto traces = run_scenarios(family);
  json all = json::array();
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& sc = family[i];
    const auto& tr = traces[i];
    KeyValueFile kv = scenario_to_kv(sc);
    {
      std::ofstream f(mf.output("scenario_" + sc.name + ".txt"));
      f << kv.to_string();
    }
    write_trace_csv(mf.output("trace_" + sc.name + ".csv"), tr);
    json m = trace_metrics(sc, tr);
    if (sc.reference.amplitude > 0.0) {
      const FrequencyResponseSet cl = closed_loop_frf(tr, sc.reference.r0);
      write_frf_csv(mf.output("frf_" + sc.name + ".csv"), cl);
      double dev = 0.0;
      const ReferenceModel ref;
      for (const auto& s : cl.samples()) {
        dev = std::max(dev, std::abs(20.0 * std::log10(std::abs(s.value) /
                                                        std::abs(ref.eval({0.0, s.omega})))));
      }
      m["sweep_amplitude"] = sc.reference.amplitude;
      m["max_gain_deviation_db"] = dev;
    }
    all.push_back(m);
    out << "simulate: " << sc.name << " (" << sc.controller.type << ") saturated "
        << m["saturated_fraction"].get<double>() << "\n";
  }
  mf.metrics(all);
  mf.write();
  return 0;
}

int cmd_curves(const Common& c, const std::vector<std::string>& args, double step,
               std::ostream& out) {
  ensure_dir(c.out_dir);
  Manifest mf("curves", args, c);
  Scenario base;
  base.plant.noise_std = 0.0;
  base.controller.type = "linear";
  if (!c.config.empty()) {
    base = load_scenario(c.config);
    mf.input(c.config);
  }
  if (c.seed_given) base.seed = c.seed;
  apply_mode(base, c);
  mf.config(scenario_to_kv(base));
  if (!(step > 0.0)) throw ConfigError("curves: --step must be > 0");

  std::vector<double> angles;
  const double lo = base.map.table().min_angle();
  const double hi = base.map.table().max_angle();
  for (int i = 0;; ++i) {
    const double d = lo + step * i;
    if (d > hi + 1e-9) break;
    angles.push_back(std::min(d, hi));
  }

  CsvTable volt;
  volt.header = {"delta_deg", "u_star"};
  for (const double d : angles) volt.rows.push_back({d, unforced_voltage(base.map, d)});
  write_csv(mf.output("voltage_curve.csv"), volt);

  const LiftModel lm = LiftModel::surrogate_default();
  const auto unc = lift_vs_angle(lm, angles);
  const auto ctl = lift_vs_angle(lm, angles, make_steady_duty_probe(base));
  CsvTable lift;
  lift.header = {"delta_deg", "cl_uncontrolled", "cl_controlled", "mean_alpha", "converged"};
  for (std::size_t i = 0; i < angles.size(); ++i) {
    lift.rows.push_back(
        {angles[i], unc[i].cl, ctl[i].cl, ctl[i].mean_alpha, ctl[i].converged ? 1.0 : 0.0});
  }
  write_csv(mf.output("lift_curve.csv"), lift);
  mf.metrics({{"angles", angles.size()}});
  mf.write();
  out << "curves: " << angles.size() << " angles\n";
  return 0;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  std::ifstream f(manifest_path);
  if (!f) throw ConfigError("cannot open manifest '" + manifest_path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  std::vector<std::string> args = doc.at("args").get<std::vector<std::string>>();
  bool replaced = false;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--out-dir") {
      args[i + 1] = out_dir;
      replaced = true;
    }
  }
  if (!replaced) {
    args.push_back("--out-dir");
    args.push_back(out_dir);
  }
  for (const auto& in : doc.at("inputs")) {
    const auto path = in.at("path").get<std::string>();
    if (file_digest(path) != in.at("digest").get<std::string>()) {
      err << "replay: input '" << path << "' changed since the manifest was written\n";
      return 3;
    }
  }
  std::ostringstream sink;
  const int rc = run_cli(args, sink, err);
  if (rc != 0) return rc;
  int mismatches = 0;
  for (const auto& o : doc.at("outputs")) {
    const auto name = o.at("file").get<std::string>();
    const auto got = file_digest((fs::path(out_dir) / name).string());
    if (got != o.at("digest").get<std::string>()) {
      err << "replay: " << name << " differs\n";
      ++mismatches;
    }
  }
  out << "replay: " << doc.at("outputs").size() - mismatches << "/" << doc.at("outputs").size()
      << " outputs identical\n";
  return mismatches == 0 ? 0 : 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flow-separation control toolkit: data-driven and antithetic integral designs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FLOWSEP_VERSION);

  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "key=value configuration file");
    sub->add_option("--out-dir", c.out_dir, "output directory");
    sub->add_option("--seed", c.seed, "random seed")->each([&](const std::string&) { c.seed_given = true; });
  };

  auto* sweep = app.add_subcommand("sweep", "write a logarithmic duty-cycle sweep");
  add_common(sweep);

  double ol_delta = 24.0;
  auto* openloop = app.add_subcommand("openloop", "drive the surrogate plant with a sweep");
  add_common(openloop);
  openloop->add_option("--delta", ol_delta, "flap angle in degrees");

  IdentifyOpts idf;
  auto* identify = app.add_subcommand("identify", "estimate an FRF from u and y CSV files");
  add_common(identify);
  identify->add_option("--u", idf.u_path, "input series CSV (t,value)")->required();
  identify->add_option("--y", idf.y_path, "output series CSV (t,value)")->required();
  identify->add_option("--n-out", idf.n_out, "number of log-spaced frequencies");
  identify->add_option("--f-lo", idf.f_lo, "lowest frequency, Hz");
  identify->add_option("--f-hi", idf.f_hi, "highest frequency, Hz");
  identify->add_option("--segment", idf.segment, "spectral segment length, samples");

  DesignOpts des;
  auto* design = app.add_subcommand("design-lddc", "Loewner data-driven controller design");
  add_common(design);
  design->set_help_flag("--help", "print this help message and exit");
  design->add_option("--frf", des.frf_path, "FRF CSV (omega_rad_s,re,im)")->required();
  design->add_option("--omega0", des.omega0, "reference model cut-off, rad/s");
  design->add_option("--h", des.h, "controller sample period, s");
  design->add_option("--order", c.order, "reduced order r (0 = minimal)");
  design->add_option("--method", des.method, "bilinear | backward");
  design->add_option("--tol", des.tol, "relative rank tolerance");

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "run closed-loop scenarios");
  add_common(simulate);
  simulate->add_option("--mode", c.mode, "linear | aic");
  simulate->add_option("--preset", sim.preset, "constant | angle-steps | ramp | sweep-family");
  simulate->add_option("--amplitude", sim.amplitude, "reference sweep amplitude (sweep-family)");

  double curve_step = 0.5;
  auto* curves = app.add_subcommand("curves", "voltage and lift curves against flap angle");
  add_common(curves);
  curves->add_option("--mode", c.mode, "linear | aic");
  curves->add_option("--step", curve_step, "angle step, deg");

  std::string manifest_path, replay_out;
  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare outputs");
  replay->add_option("--manifest", manifest_path, "manifest.json of a previous run")->required();
  replay->add_option("--out-dir", replay_out, "directory for the re-run")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  std::vector<std::string> full = args;
  try {
    if (sweep->parsed()) return cmd_sweep(c, full, out);
    if (openloop->parsed()) return cmd_openloop(c, full, ol_delta, out);
    if (identify->parsed()) return cmd_identify(c, full, idf, out);
    if (design->parsed()) return cmd_design(c, full, des, out, err);
    if (simulate->parsed()) return cmd_simulate(c, full, sim, out);
    if (curves->parsed()) return cmd_curves(c, full, curve_step, out);
    if (replay->parsed()) return cmd_replay(manifest_path, replay_out, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace flowsep
