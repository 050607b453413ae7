#include "flowsep/freqdata.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "flowsep/errors.hpp"

namespace flowsep {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(LogSweep, DegenerateBandIsPureSine) {
  SweepConfig c{1.0, 1.0, 1.0, 1000.0, 0.1, 0.5};
  const TimeSeries ts = generate_log_sweep(c);
  ASSERT_EQ(ts.size(), 1000u);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(ts.values[i], 0.5 + 0.1 * std::sin(2 * kPi * i / 1000.0), 1e-12);
  }
}

TEST(LogSweep, IdentificationSweepLengthAndStartFrequency) {
  SweepConfig c{0.01, 10.0, 180.0, 1250.0, 0.2, 0.3};
  const TimeSeries ts = generate_log_sweep(c);
  EXPECT_EQ(ts.size(), 225000u);
  EXPECT_DOUBLE_EQ(sweep_instantaneous_frequency(c, 0.0), 0.01);
  EXPECT_NEAR(sweep_instantaneous_frequency(c, 180.0), 10.0, 1e-9);
  // Numerical derivative of the phase matches the exponential law mid-sweep.
  const double t = 90.0, dt = 1e-4;
  const double K = std::log(1000.0) / 180.0;
  auto phase = [&](double tt) { return 2 * kPi * 0.01 * std::expm1(K * tt) / K; };
  const double f_num = (phase(t + dt) - phase(t - dt)) / (2 * dt) / (2 * kPi);
  EXPECT_NEAR(f_num, sweep_instantaneous_frequency(c, t), 1e-6);
}

TEST(LogSweep, ZeroAmplitudeIsConstant) {
  SweepConfig c{0.1, 2.0, 5.0, 100.0, 0.0, 0.42};
  for (double v : generate_log_sweep(c).values) EXPECT_EQ(v, 0.42);
}

TEST(LogSweep, SamplesStayInsideEnvelope) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    SweepConfig c;
    c.fs = 200.0;
    c.f_min = 0.01 + U(rng);
    c.f_max = c.f_min + U(rng) * 50.0;
    c.duration = 1.0 + 20.0 * U(rng);
    c.offset = 0.2 + 0.6 * U(rng);
    c.amplitude = std::min(c.offset, 1.0 - c.offset) * U(rng);
    for (double v : generate_log_sweep(c).values) {
      EXPECT_GE(v, c.offset - c.amplitude - 1e-15);
      EXPECT_LE(v, c.offset + c.amplitude + 1e-15);
    }
  }
}

TEST(LogSweep, InvalidConfigNamesTheBound) {
  SweepConfig c{0.01, 700.0, 10.0, 1250.0, 0.2, 0.3};
  try {
    generate_log_sweep(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fs/2"), std::string::npos);
  }
  c = SweepConfig{0.01, 10.0, 10.0, 1250.0, 0.4, 0.3};
  EXPECT_THROW(generate_log_sweep(c), ConfigError);
  c = SweepConfig{0.01, 10.0, 10.0, 1250.0, 0.4, 0.7};
  EXPECT_THROW(generate_log_sweep(c), ConfigError);
}

TimeSeries white_noise(std::size_t n, double dt, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  TimeSeries ts;
  ts.dt = dt;
  ts.values.resize(n);
  for (auto& v : ts.values) v = N(rng);
  return ts;
}

TEST(EstimateFrf, WireGivesUnity) {
  const TimeSeries u = white_noise(20000, 0.01, 1);
  const auto frf = estimate_frf(u, u, 20, 0.05, 10.0, {2048, 0.5});
  for (const auto& s : frf.samples()) {
    EXPECT_NEAR(s.value.real(), 1.0, 1e-6);
    EXPECT_NEAR(s.value.imag(), 0.0, 1e-6);
  }
}

TEST(EstimateFrf, DelayGivesUnitGainAndLinearPhase) {
  const std::size_t d = 3;
  const double dt = 0.01;
  const TimeSeries u = white_noise(200000, dt, 2);
  TimeSeries y = u;
  for (std::size_t i = 0; i < y.size(); ++i) y.values[i] = i >= d ? u.values[i - d] : 0.0;
  const auto frf = estimate_frf(u, y, 16, 0.05, 5.0, {4096, 0.5});
  for (const auto& s : frf.samples()) {
    const std::complex<double> oracle = std::exp(std::complex<double>(0.0, -s.omega * d * dt));
    EXPECT_NEAR(std::abs(s.value), 1.0, 1e-3);
    EXPECT_NEAR(std::arg(s.value / oracle), 0.0, 1e-3);
  }
}

TEST(EstimateFrf, FirstOrderFilterIsMinusThreeDbAtCutoff) {
  const double fs = 100.0, dt = 1.0 / fs, w0 = 2 * kPi;
  const TimeSeries u = generate_log_sweep({0.05, 20.0, 120.0, fs, 0.2, 0.5});
  // Bilinear first-order filter; warping at 1 Hz is below 0.05 %.
  const double a = w0 * dt / 2.0;
  TimeSeries y = u;
  double prev_u = u.values[0], prev_y = u.values[0];
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double yi = ((1 - a) * prev_y + a * (u.values[i] + prev_u)) / (1 + a);
    y.values[i] = yi;
    prev_u = u.values[i];
    prev_y = yi;
  }
  const auto frf = estimate_frf(u, y, 40, 0.2, 5.0, {2048, 0.5});
  double best = 1e9, gain_db = 0.0;
  for (const auto& s : frf.samples()) {
    if (std::abs(s.omega - w0) < best) {
      best = std::abs(s.omega - w0);
      gain_db = 20.0 * std::log10(std::abs(s.value));
    }
  }
  EXPECT_LT(best, 0.2);
  EXPECT_NEAR(gain_db, -3.0103, 0.5);
}

TEST(EstimateFrf, ScaleConsistency) {
  const TimeSeries u = white_noise(16384, 0.01, 3);
  TimeSeries y = white_noise(16384, 0.01, 4);
  for (std::size_t i = 0; i < y.size(); ++i) y.values[i] += 0.5 * u.values[i];
  const auto base = estimate_frf(u, y, 12, 0.1, 10.0, {1024, 0.5});
  for (const double c : {2.0, -0.5}) {
    TimeSeries yc = y;
    for (auto& v : yc.values) v *= c;
    const auto scaled = estimate_frf(u, yc, 12, 0.1, 10.0, {1024, 0.5});
    ASSERT_EQ(scaled.size(), base.size());
    for (std::size_t k = 0; k < base.size(); ++k) EXPECT_EQ(scaled[k].value, c * base[k].value);
  }
  TimeSeries y3 = y;
  for (auto& v : y3.values) v *= 3.7;
  const auto s3 = estimate_frf(u, y3, 12, 0.1, 10.0, {1024, 0.5});
  for (std::size_t k = 0; k < base.size(); ++k) {
    EXPECT_LT(std::abs(s3[k].value - 3.7 * base[k].value), 1e-12 * std::abs(base[k].value) + 1e-15);
  }
}

TEST(EstimateFrf, OutputIsSortedLogSpacedWithoutDuplicates) {
  const TimeSeries u = white_noise(8192, 0.01, 5);
  const auto frf = estimate_frf(u, u, 200, 0.02, 1.0, {1024, 0.5});
  for (std::size_t k = 1; k < frf.size(); ++k) EXPECT_GT(frf[k].omega, frf[k - 1].omega);
  EXPECT_LT(frf.size(), 200u);
}

TEST(EstimateFrf, Errors) {
  const TimeSeries u = white_noise(4096, 0.01, 6);
  TimeSeries shorter = u;
  shorter.values.pop_back();
  EXPECT_THROW(estimate_frf(u, shorter, 8, 0.1, 10.0), DimensionError);
  TimeSeries other_dt = u;
  other_dt.dt = 0.02;
  EXPECT_THROW(estimate_frf(u, other_dt, 8, 0.1, 10.0), DimensionError);
  EXPECT_THROW(estimate_frf(u, u, 8, 0.1, 60.0), ConfigError);
  TimeSeries flat = u;
  for (auto& v : flat.values) v = 1.0;
  EXPECT_THROW(estimate_frf(flat, u, 8, 0.1, 10.0), UnexcitedFrequencyError);
  // A pure 1 Hz tone leaves 10 Hz unexcited.
  TimeSeries tone = u;
  for (std::size_t i = 0; i < tone.size(); ++i) tone.values[i] = std::sin(2 * kPi * 1.0 * i * 0.01);
  EXPECT_THROW(estimate_frf(tone, tone, 8, 0.5, 20.0, {1000, 0.5}), UnexcitedFrequencyError);
}

TEST(NormalizeVoltage, Examples) {
  EXPECT_DOUBLE_EQ(normalize_voltage(1.2, 1.2, 3.4), 0.0);
  EXPECT_DOUBLE_EQ(normalize_voltage(3.4, 1.2, 3.4), 1.0);
  EXPECT_DOUBLE_EQ(normalize_voltage(2.3, 1.2, 3.4), 0.5);
  EXPECT_THROW(normalize_voltage(1.0, 2.0, 2.0), RangeError);
}

TEST(NormalizeVoltage, MonotoneAndIdempotent) {
  TimeSeries ts;
  ts.dt = 0.1;
  for (int i = 0; i < 50; ++i) ts.values.push_back(1.0 + 0.05 * i);
  const TimeSeries n1 = normalize_voltage(ts, 1.0, 3.45);
  for (std::size_t i = 1; i < n1.size(); ++i) EXPECT_GT(n1.values[i], n1.values[i - 1]);
  const TimeSeries n2 = normalize_voltage(n1, 0.0, 1.0);
  for (std::size_t i = 0; i < n1.size(); ++i) EXPECT_EQ(n2.values[i], n1.values[i]);
}

TEST(FrequencyResponseSet, Invariants) {
  EXPECT_THROW(FrequencyResponseSet({{1.0, 1.0}}), ConfigError);
  EXPECT_THROW(FrequencyResponseSet({{1.0, 1.0}, {1.0, 2.0}}), ConfigError);
  EXPECT_THROW(FrequencyResponseSet({{0.0, 1.0}, {1.0, 2.0}}), ConfigError);
  EXPECT_NO_THROW(FrequencyResponseSet({{0.5, 1.0}, {1.0, 2.0}}));
}

TEST(FreqdataCsv, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "flowsep_freqdata_csv";
  std::filesystem::create_directories(dir);
  TimeSeries ts;
  ts.t0 = 0.5;
  ts.dt = 0.01;
  ts.values = {0.1, 0.2, 1.0 / 3.0, -4.5};
  write_time_series_csv((dir / "ts.csv").string(), ts);
  const TimeSeries back = read_time_series_csv((dir / "ts.csv").string());
  EXPECT_EQ(back.values, ts.values);
  EXPECT_NEAR(back.dt, ts.dt, 1e-15);

  const FrequencyResponseSet frf({{0.1, {1.0, -2.0}}, {0.7, {1.0 / 7.0, 3.0}}});
  write_frf_csv((dir / "frf.csv").string(), frf);
  const auto fb = read_frf_csv((dir / "frf.csv").string());
  ASSERT_EQ(fb.size(), 2u);
  EXPECT_EQ(fb[1].value, frf[1].value);
  EXPECT_EQ(fb[0].omega, 0.1);
}

}  // namespace
}  // namespace flowsep
