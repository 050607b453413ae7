#include "flowsep/plant.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "flowsep/errors.hpp"

namespace flowsep {
namespace {

TEST(SeparationMap, Landmarks) {
  const SeparationMap m;
  EXPECT_DOUBLE_EQ(m(2.0), 1.0);
  EXPECT_DOUBLE_EQ(m(13.8), 0.3903);
  EXPECT_DOUBLE_EQ(m(32.0), 0.0);
  // Local minimum at 20 deg, global minimum at 32 deg.
  EXPECT_LT(m(20.0), m(19.0));
  EXPECT_LT(m(20.0), m(21.0));
  for (double d = 2.0; d <= 37.0; d += 0.25) EXPECT_GE(m(d), m(32.0));
  EXPECT_THROW(m(40.0), RangeError);
  EXPECT_THROW(m(-1.0), RangeError);
}

TEST(AngleTable, InterpolationAndValidation) {
  const AngleTable t({{0.0, 0.0}, {10.0, 1.0}, {20.0, 3.0}});
  EXPECT_DOUBLE_EQ(t(5.0), 0.5);
  EXPECT_DOUBLE_EQ(t(15.0), 2.0);
  EXPECT_DOUBLE_EQ(t(20.0), 3.0);
  EXPECT_THROW(AngleTable({{0.0, 0.0}, {0.0, 1.0}}), ConfigError);
  EXPECT_THROW(AngleTable({{0.0, 0.0}}), ConfigError);
  EXPECT_THROW(SeparationMap(AngleTable({{0.0, 0.0}, {1.0, 1.5}})), ConfigError);
}

TEST(AngleTable, CsvRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "flowsep_map.csv").string();
  const SeparationMap m;
  write_angle_table_csv(path, m.table());
  EXPECT_EQ(read_angle_table_csv(path).knots(), m.table().knots());
}

PlantParams quiet(double rho = 0.7) {
  PlantParams p;
  p.noise_std = 0.0;
  p.fast_fraction = rho;
  return p;
}

PulseTrain constant_train(double alpha, int N = 100, double h = 0.01) {
  PFAConfig cfg;
  cfg.N = N;
  return duty_to_pulses(alpha, h, cfg);
}

TEST(FlapPlant, ZeroDutyHoldsUnforcedLevel) {
  FlapPlant p(SeparationMap{}, quiet());
  p.initialize(24.0, 1e-4, 1);
  EXPECT_DOUBLE_EQ(p.current_output(), SeparationMap{}(24.0));
  for (int k = 0; k < 200; ++k) EXPECT_DOUBLE_EQ(p.step(24.0, constant_train(0.0)), SeparationMap{}(24.0));
}

TEST(FlapPlant, StaticGainMatchesParameter) {
  const PlantParams pp = quiet();
  FlapPlant p(SeparationMap{}, pp);
  p.initialize(24.0, 1e-4, 1);
  const auto train = constant_train(0.3);
  double y = 0.0;
  for (int k = 0; k < 3000; ++k) y = p.step(24.0, train);
  EXPECT_NEAR(y, SeparationMap{}(24.0) + pp.g0_duty * train.mean(), 1e-9);
}

TEST(FlapPlant, SlowPathMatchesAnalyticStepResponse) {
  // rho = 0: y = U + g0 (1 - exp(-w (t - tau))) for t > tau, averaged per period.
  const PlantParams pp = quiet(0.0);
  FlapPlant p(SeparationMap{}, pp);
  const double h = 0.01, U = SeparationMap{}(24.0), w = pp.omega_p, g0 = pp.g0_duty;
  p.initialize(24.0, h / 100.0, 1);
  const auto train = constant_train(1.0);
  double t63 = -1.0;
  for (int k = 0; k < 300; ++k) {
    const double y = p.step(24.0, train);
    const double a = k * h, b = a + h;
    double oracle = U;
    if (a >= pp.tau - 1e-12) {
      oracle = U + g0 * (1.0 - (std::exp(-w * (a - pp.tau)) - std::exp(-w * (b - pp.tau))) / (w * h));
    }
    ASSERT_NEAR(y, oracle, 1e-12) << "period " << k;
    if (t63 < 0.0 && y - U >= (1.0 - std::exp(-1.0)) * g0) t63 = b;
  }
  EXPECT_NEAR(t63, pp.tau + 1.0 / w, 0.02);
}

TEST(FlapPlant, OutputClampedToUnitInterval) {
  PlantParams pp = quiet();
  pp.g0_duty = 0.5;
  FlapPlant p(SeparationMap{}, pp);
  p.initialize(2.0, 1e-4, 1);
  for (int k = 0; k < 500; ++k) {
    const double y = p.step(2.0, constant_train(1.0));
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 1.0);
  }
  PlantParams noisy;
  noisy.noise_std = 0.5;
  FlapPlant q(SeparationMap{}, noisy);
  q.initialize(32.0, 1e-4, 3);
  for (int k = 0; k < 500; ++k) {
    const double y = q.step(32.0, constant_train(0.0));
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 1.0);
  }
}

TEST(FlapPlant, DeterministicForSeed) {
  auto run = [](std::uint64_t seed) {
    FlapPlant p(SeparationMap{}, PlantParams{});
    p.initialize(18.0, 1e-4, seed);
    std::vector<double> ys;
    for (int k = 0; k < 300; ++k) ys.push_back(p.step(18.0, constant_train((k % 7) / 10.0)));
    return ys;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(FlapPlant, Errors) {
  FlapPlant p(SeparationMap{}, quiet());
  EXPECT_THROW(p.step(24.0, constant_train(0.5)), ConfigError);
  EXPECT_THROW(p.current_output(), ConfigError);
  p.initialize(24.0, 1e-4, 1);
  EXPECT_THROW(p.step(24.0, constant_train(0.5, 10)), ConfigError);
  PlantParams bad;
  bad.fast_fraction = 1.5;
  EXPECT_THROW(FlapPlant(SeparationMap{}, bad), ConfigError);
}

TEST(PlantParams, KeyValueRoundTrip) {
  PlantParams p;
  p.tau = 0.125;
  p.noise_std = 0.0;
  KeyValueFile kv;
  p.to_kv(kv);
  const auto b = PlantParams::from_kv(kv);
  EXPECT_EQ(b.tau, 0.125);
  EXPECT_EQ(b.noise_std, 0.0);
  EXPECT_EQ(b.g0_duty, p.g0_duty);
}

TEST(Aero, PressureCoefficient) {
  FlowConditions fc;
  fc.rho_inf = 1.25;
  fc.U_inf = 32.0;  // dynamic pressure 640 Pa
  EXPECT_EQ(pressure_coefficient(fc.p_inf, fc), 0.0);
  EXPECT_EQ(pressure_coefficient(fc.p_inf + 640.0, fc), 1.0);
  EXPECT_EQ(pressure_coefficient(fc.p_inf - 1280.0, fc), -2.0);
}

TEST(Aero, LiftCoefficientTrapezoid) {
  PressureDistribution flat{{0.0, 0.5, -1.0}, {0.5, 0.5, -1.0}, {1.0, 0.5, -1.0}};
  EXPECT_DOUBLE_EQ(lift_coefficient(flat), 1.5);
  // Linear integrand is integrated exactly.
  PressureDistribution ramp;
  for (int i = 0; i <= 10; ++i) ramp.push_back({i / 10.0, 0.0, -i / 10.0});
  EXPECT_NEAR(lift_coefficient(ramp), 0.5, 1e-15);
  // Linearity in the pressure difference.
  PressureDistribution twice = ramp;
  for (auto& s : twice) s.cp_upper *= 2.0;
  EXPECT_NEAR(lift_coefficient(twice), 2.0 * lift_coefficient(ramp), 1e-15);
  EXPECT_THROW(lift_coefficient({{0.0, 0.0, 0.0}, {0.9, 0.0, 0.0}}), ConfigError);
}

TEST(Aero, Reynolds) {
  EXPECT_NEAR(reynolds(FlowConditions{}, Geometry{}), 34.5 * 1.087 / 1.569e-5, 1e-6);
  EXPECT_NEAR(reynolds(FlowConditions{}, Geometry{}), 2.39e6, 0.01e6);
}

TEST(LiftCurve, UncontrolledAndControlled) {
  const auto m = LiftModel::surrogate_default();
  const auto base = lift_vs_angle(m, {2.0, 7.0, 12.0});
  EXPECT_DOUBLE_EQ(base[0].cl, 0.60);
  EXPECT_DOUBLE_EQ(base[1].cl, 0.90);
  EXPECT_DOUBLE_EQ(base[2].cl, 1.20);
  const auto ctl = lift_vs_angle(m, {24.0}, [](double) { return SteadyDuty{0.4, true}; });
  EXPECT_NEAR(ctl[0].cl, m.uncontrolled(24.0) + 0.565 * 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(ctl[0].mean_alpha, 0.4);
}

}  // namespace
}  // namespace flowsep
