#include "flowsep/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flowsep/errors.hpp"

namespace flowsep {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw RangeError(std::string(what) + " must be finite");
}

// Nonnegative root of a x^2 + b x - c = 0 with a > 0, c >= 0.
double positive_root(double a, double b, double c) {
  const double disc = std::sqrt(b * b + 4.0 * a * c);
  if (b >= 0.0) return disc + b == 0.0 ? 0.0 : 2.0 * c / (b + disc);
  return (disc - b) / (2.0 * a);
}

}  // namespace

double saturate_duty(double u, double alpha_max) { return std::clamp(u, 0.0, alpha_max); }

void ActuatorScaling::validate() const {
  if (!(command_per_duty > 0.0)) throw ConfigError("command_per_duty must be > 0");
  if (!(alpha_max > 0.0 && alpha_max <= 1.0)) throw ConfigError("alpha_max must be in (0, 1]");
}

ControlCommand ActuatorScaling::command(double u) const {
  const double d = u / command_per_duty;
  ControlCommand c;
  c.u = u;
  c.alpha = saturate_duty(d, alpha_max);
  c.saturated = d < 0.0 || d > alpha_max;
  return c;
}

LinearIntegralController::LinearIntegralController(double k, double h, ActuatorScaling scaling,
                                                   double x0)
    : k_(k), h_(h), scaling_(scaling), x_(x0) {
  if (!(h > 0.0)) throw ConfigError("linear controller: h must be > 0");
  require_finite(k, "linear controller gain");
  require_finite(x0, "linear controller initial state");
  scaling_.validate();
}

ControlCommand LinearIntegralController::step(double r, double y) {
  require_finite(r, "reference");
  require_finite(y, "measurement");
  const double u = x_;
  x_ += k_ * (r - y);
  return scaling_.command(u);
}

ControlCommand linear_step(LinearIntegralController& c, double r, double y) { return c.step(r, y); }

AicMode parse_aic_mode(const std::string& s) {
  if (s == "as-printed" || s == "as_printed" || s == "explicit") return AicMode::AsPrinted;
  if (s == "projected") return AicMode::Projected;
  if (s == "implicit") return AicMode::Implicit;
  throw ConfigError("unknown AIC mode '" + s + "' (as-printed | projected | implicit)");
}

std::string to_string(AicMode m) {
  switch (m) {
    case AicMode::AsPrinted: return "as-printed";
    case AicMode::Projected: return "projected";
    case AicMode::Implicit: return "implicit";
  }
  return "?";
}

AICController::AICController(double k, double eta, double h, AicMode mode, ActuatorScaling scaling,
                             AicState z0)
    : k_(k), eta_(eta), h_(h), mode_(mode), scaling_(scaling) {
  if (!(h > 0.0)) throw ConfigError("AIC: h must be > 0");
  if (!(eta > 0.0)) throw ConfigError("AIC: eta must be > 0");
  require_finite(k, "AIC gain");
  scaling_.validate();
  reset(z0);
}

void AICController::reset(AicState z0) {
  require_finite(z0.z1, "AIC z1");
  require_finite(z0.z2, "AIC z2");
  if (mode_ != AicMode::AsPrinted && (z0.z1 < 0.0 || z0.z2 < 0.0)) {
    throw RangeError("AIC: initial states must be nonnegative");
  }
  z_ = z0;
}

AicState AICController::update(const AicState& z, double r, double y, double eta, double h,
                               AicMode mode) {
  switch (mode) {
    case AicMode::AsPrinted: {
      const double a = eta * z.z1 * z.z2;
      return {z.z1 + h * (r - a), z.z2 + h * (y - a)};
    }
    case AicMode::Projected: {
      const double a = eta * z.z1 * z.z2;
      return {std::max(0.0, z.z1 + h * (r - a)), std::max(0.0, z.z2 + h * (y - a))};
    }
    case AicMode::Implicit: {
      // z1' - z2' = c is conserved by the annihilation term.
      const double he = h * eta;
      const double c = z.z1 - z.z2 + h * (r - y);
      return {positive_root(he, 1.0 - he * c, z.z1 + h * r),
              positive_root(he, 1.0 + he * c, z.z2 + h * y)};
    }
  }
  return z;
}

ControlCommand AICController::step(double r, double y) {
  require_finite(r, "reference");
  require_finite(y, "measurement");
  if (r < 0.0 || y < 0.0) {
    throw RangeError("AIC: reference and measurement must be nonnegative");
  }
  const double u = k_ * z_.z1;
  z_ = update(z_, r, y, eta_, h_, mode_);
  if (!std::isfinite(z_.z1) || !std::isfinite(z_.z2)) {
    throw DivergenceError("AIC: state diverged");
  }
  return scaling_.command(u);
}

ControlCommand aic_step(AICController& c, double r, double y) { return c.step(r, y); }

AicTrajectory integrate_aic_continuous(double k, double eta,
                                       const std::function<double(double)>& r,
                                       const std::function<double(double)>& y, double T,
                                       double fine_step, AicState z0) {
  if (z0.z1 < 0.0 || z0.z2 < 0.0) throw RangeError("continuous AIC: negative initial state");
  if (!(fine_step > 0.0) || !(T >= 0.0)) throw ConfigError("continuous AIC: need T >= 0, step > 0");
  if (!(eta > 0.0)) throw ConfigError("continuous AIC: eta must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(T / fine_step));
  if (std::abs(static_cast<double>(n) * fine_step - T) > 1e-9 * std::max(T, 1.0)) {
    throw ConfigError("continuous AIC: T must be a multiple of the fine step");
  }
  AicTrajectory tr;
  tr.t.reserve(n + 1);
  tr.z1.reserve(n + 1);
  tr.z2.reserve(n + 1);
  tr.u.reserve(n + 1);
  auto push = [&](double t, double a, double b) {
    tr.t.push_back(t);
    tr.z1.push_back(a);
    tr.z2.push_back(b);
    tr.u.push_back(k * a);
  };
  auto f = [&](double t, double a, double b, double& da, double& db) {
    const double ann = eta * a * b;
    da = r(t) - ann;
    db = y(t) - ann;
  };
  double a = z0.z1, b = z0.z2;
  push(0.0, a, b);
  const double hs = fine_step;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * hs;
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    f(t, a, b, k1a, k1b);
    f(t + hs / 2, a + hs / 2 * k1a, b + hs / 2 * k1b, k2a, k2b);
    f(t + hs / 2, a + hs / 2 * k2a, b + hs / 2 * k2b, k3a, k3b);
    f(t + hs, a + hs * k3a, b + hs * k3b, k4a, k4b);
    a = std::max(0.0, a + hs / 6 * (k1a + 2 * k2a + 2 * k3a + k4a));
    b = std::max(0.0, b + hs / 6 * (k1b + 2 * k2b + 2 * k3b + k4b));
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw DivergenceError("continuous AIC diverged at t = " + std::to_string(t));
    }
    push(static_cast<double>(i + 1) * hs, a, b);
  }
  return tr;
}

DiscretizationMethod parse_discretization(const std::string& s) {
  if (s == "bilinear" || s == "tustin") return DiscretizationMethod::Bilinear;
  if (s == "backward" || s == "backward-euler") return DiscretizationMethod::Backward;
  throw ConfigError("unknown discretization method '" + s + "' (bilinear | backward)");
}

StateSpaceModel discretize(const StateSpaceModel& m, double h, DiscretizationMethod method) {
  m.validate();
  if (m.domain != TimeDomain::Continuous) throw ConfigError("discretize: model is already sampled");
  if (!(h > 0.0)) throw ConfigError("discretize: h must be > 0");
  const Eigen::Index n = m.order();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd T = method == DiscretizationMethod::Bilinear ? Eigen::MatrixXd((2.0 / h) * m.E - m.A)
                                                               : Eigen::MatrixXd(m.E - h * m.A);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
  if (!lu.isInvertible()) throw NumericalError("discretize: transform matrix is singular");
  const Eigen::MatrixXd F = lu.inverse();

  StateSpaceModel d;
  d.domain = TimeDomain::Sampled;
  d.h = h;
  d.E = I;
  if (method == DiscretizationMethod::Bilinear) {
    d.A = F * ((2.0 / h) * m.E + m.A);
    d.B = F * m.B;
    d.C = m.C * (I + d.A);
    d.D = m.D + (m.C * F * m.B)(0);
  } else {
    d.A = F * m.E;
    d.B = F * m.B;
    d.C = h * m.C * d.A;
    d.D = m.D + h * (m.C * F * m.B)(0);
  }
  d.validate();
  return d;
}

double extract_integral_gain(const StateSpaceModel& sampled, double pole_tol) {
  sampled.validate();
  if (sampled.domain != TimeDomain::Sampled) {
    throw ConfigError("extract_integral_gain: model must be sampled");
  }
  if (sampled.order() == 0) throw NotAnIntegratorError("extract_integral_gain: static model");
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sampled.E);
  if (!lu.isInvertible()) throw NumericalError("extract_integral_gain: E is singular");
  const Eigen::EigenSolver<Eigen::MatrixXd> es(lu.solve(sampled.A));
  if (es.info() != Eigen::Success) throw NumericalError("extract_integral_gain: eigensolver failed");
  const Eigen::VectorXcd lam = es.eigenvalues();
  Eigen::Index best = 0;
  (lam.array() - 1.0).abs().minCoeff(&best);
  const double dist = std::abs(lam(best) - 1.0);
  if (dist > pole_tol) {
    std::ostringstream msg;
    msg << "not an integrator: nearest pole to z = 1 is " << lam(best) << " (distance " << dist
        << ")";
    throw NotAnIntegratorError(msg.str());
  }
  const Eigen::MatrixXcd V = es.eigenvectors();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> vlu(V);
  const Eigen::VectorXd eb = lu.solve(sampled.B);
  const Eigen::VectorXcd b = vlu.solve(eb.cast<std::complex<double>>());
  const Eigen::RowVectorXcd c = sampled.C.cast<std::complex<double>>() * V;
  return (c(best) * b(best)).real();
}

void ControllerParams::validate() const {
  if (type != "linear" && type != "aic" && type != "none") {
    throw ConfigError("controller type must be linear, aic or none (got '" + type + "')");
  }
  if (!(h > 0.0)) throw ConfigError("controller h must be > 0");
  if (!(eta > 0.0)) throw ConfigError("controller eta must be > 0");
  if (!std::isfinite(k)) throw ConfigError("controller k must be finite");
  scaling().validate();
}

ControllerParams ControllerParams::from_kv(const KeyValueFile& kv, const std::string& section) {
  ControllerParams p;
  p.type = kv.get_string(section, "type", p.type);
  p.k = kv.get_double(section, "k", p.k);
  p.eta = kv.get_double(section, "eta", p.eta);
  p.h = kv.get_double(section, "h", p.h);
  p.mode = parse_aic_mode(kv.get_string(section, "mode", to_string(p.mode)));
  p.alpha_max = kv.get_double(section, "alpha_max", p.alpha_max);
  p.command_per_duty = kv.get_double(section, "command_per_duty", p.command_per_duty);
  p.x0 = kv.get_double(section, "x0", p.x0);
  p.z1_0 = kv.get_double(section, "z1_0", p.z1_0);
  p.z2_0 = kv.get_double(section, "z2_0", p.z2_0);
  p.validate();
  return p;
}

void ControllerParams::to_kv(KeyValueFile& kv, const std::string& section) const {
  kv.set(section, "type", type);
  kv.set(section, "k", format_double(k));
  kv.set(section, "eta", format_double(eta));
  kv.set(section, "h", format_double(h));
  kv.set(section, "mode", to_string(mode));
  kv.set(section, "alpha_max", format_double(alpha_max));
  kv.set(section, "command_per_duty", format_double(command_per_duty));
  kv.set(section, "x0", format_double(x0));
  kv.set(section, "z1_0", format_double(z1_0));
  kv.set(section, "z2_0", format_double(z2_0));
}

}  // namespace flowsep
