#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flowsep/state_space.hpp"
#include "flowsep/textio.hpp"

namespace flowsep {

struct ControlCommand {
  double u = 0.0;      // unconstrained controller output (command units)
  double alpha = 0.0;  // duty fraction in [0, alpha_max]
  bool saturated = false;  // true when the clamp changed the value
};

// clamp(u, 0, alpha_max).
double saturate_duty(double u, double alpha_max);

// Maps controller output to a duty fraction: alpha = clamp(u / command_per_duty).
// With command_per_duty = 100 the command is a percentage of duty.
struct ActuatorScaling {
  double command_per_duty = 100.0;
  double alpha_max = 1.0;

  void validate() const;
  ControlCommand command(double u) const;
};

// u_k = x_k, x_{k+1} = x_k + k (r_k - y_k), i.e. K(z) = k/(z-1).
class LinearIntegralController {
 public:
  LinearIntegralController(double k, double h, ActuatorScaling scaling = {}, double x0 = 0.0);

  ControlCommand step(double r, double y);
  void reset(double x0 = 0.0) { x_ = x0; }
  double state() const { return x_; }
  double gain() const { return k_; }
  double period() const { return h_; }

 private:
  double k_;
  double h_;
  ActuatorScaling scaling_;
  double x_;
};

ControlCommand linear_step(LinearIntegralController& c, double r, double y);

enum class AicMode { AsPrinted, Projected, Implicit };

AicMode parse_aic_mode(const std::string& s);
std::string to_string(AicMode m);

struct AicState {
  double z1 = 0.0;
  double z2 = 0.0;
};

// Discrete antithetic integral controller.
//   as-printed: z1 += h (r - eta z1 z2), z2 += h (y - eta z1 z2)
//   projected:  as-printed, then both states clamped at 0
//   implicit:   backward Euler of the same ODEs, solved in closed form
// Output u = k z1 uses the state before the update.
class AICController {
 public:
  AICController(double k, double eta, double h, AicMode mode = AicMode::Projected,
                ActuatorScaling scaling = {}, AicState z0 = {});

  ControlCommand step(double r, double y);
  const AicState& state() const { return z_; }
  void reset(AicState z0 = {});
  double gain() const { return k_; }
  double eta() const { return eta_; }
  double period() const { return h_; }
  AicMode mode() const { return mode_; }

  // One state update without output, shared by step() and trace re-feeding.
  static AicState update(const AicState& z, double r, double y, double eta, double h, AicMode mode);

 private:
  double k_;
  double eta_;
  double h_;
  AicMode mode_;
  ActuatorScaling scaling_;
  AicState z_;
};

ControlCommand aic_step(AICController& c, double r, double y);

struct AicTrajectory {
  std::vector<double> t;
  std::vector<double> z1;
  std::vector<double> z2;
  std::vector<double> u;
};

// Fixed-step RK4 of dz1 = r - eta z1 z2, dz2 = y - eta z1 z2, u = k z1.
// States are projected onto z >= 0 after each step.
AicTrajectory integrate_aic_continuous(double k, double eta,
                                       const std::function<double(double)>& r,
                                       const std::function<double(double)>& y, double T,
                                       double fine_step, AicState z0 = {});

enum class DiscretizationMethod { Bilinear, Backward };

DiscretizationMethod parse_discretization(const std::string& s);

StateSpaceModel discretize(const StateSpaceModel& m, double h, DiscretizationMethod method);

// Residue of a sampled model at its pole nearest z = 1.
double extract_integral_gain(const StateSpaceModel& sampled, double pole_tol = 1e-6);

// Controller parameter file, `key=value`.
struct ControllerParams {
  std::string type = "aic";  // linear | aic | none
  double k = 66.19;
  double eta = 300.0;
  double h = 0.01;
  AicMode mode = AicMode::Projected;
  double alpha_max = 1.0;
  double command_per_duty = 100.0;
  double x0 = 0.0;
  double z1_0 = 0.0;
  double z2_0 = 0.0;

  void validate() const;
  ActuatorScaling scaling() const { return {command_per_duty, alpha_max}; }
  static ControllerParams from_kv(const KeyValueFile& kv, const std::string& section = "");
  void to_kv(KeyValueFile& kv, const std::string& section = "") const;
};

}  // namespace flowsep
