#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace flowsep {

using cdouble = std::complex<double>;

// Uniformly sampled scalar signal.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  // Throws ConfigError when dt <= 0, empty, or non-finite.
  void validate() const;
};

struct FrequencySample {
  double omega = 0.0;  // rad/s
  cdouble value;
};

// Sampled complex transfer, strictly increasing in omega, at least two points.
class FrequencyResponseSet {
 public:
  FrequencyResponseSet() = default;
  explicit FrequencyResponseSet(std::vector<FrequencySample> samples);

  const std::vector<FrequencySample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const FrequencySample& operator[](std::size_t i) const { return samples_[i]; }
  std::vector<double> omegas() const;
  std::vector<cdouble> values() const;

 private:
  std::vector<FrequencySample> samples_;
};

struct SweepConfig {
  double f_min = 0.01;      // Hz
  double f_max = 10.0;      // Hz
  double duration = 180.0;  // s
  double fs = 1250.0;       // Hz
  double amplitude = 0.25;  // duty fraction
  double offset = 0.3;      // duty fraction

  void validate() const;
};

// offset + amplitude*sin(phi(t)), exponential chirp from f_min to f_max.
// f_min == f_max yields a pure sine.
TimeSeries generate_log_sweep(const SweepConfig& cfg);

// Instantaneous frequency of the sweep at time t (Hz).
double sweep_instantaneous_frequency(const SweepConfig& cfg, double t);

struct FrfOptions {
  std::size_t segment_length = 8192;  // clipped to the record length
  double overlap = 0.5;
};

// H1 estimate Syu/Suu with Hann-tapered, overlapping segments, reported at
// n_out log-spaced frequencies in [band_lo, band_hi] Hz snapped to FFT bins.
FrequencyResponseSet estimate_frf(const TimeSeries& u, const TimeSeries& y, std::size_t n_out,
                                  double band_lo_hz, double band_hi_hz,
                                  const FrfOptions& opts = {});

// (U - u_min) / (u_max - u_min), sample by sample.
TimeSeries normalize_voltage(const TimeSeries& series, double u_min, double u_max);
double normalize_voltage(double u, double u_min, double u_max);

// CSV `t,value`.
void write_time_series_csv(const std::string& path, const TimeSeries& ts);
TimeSeries read_time_series_csv(const std::string& path);

// CSV `omega_rad_s,re,im`.
void write_frf_csv(const std::string& path, const FrequencyResponseSet& frf);
FrequencyResponseSet read_frf_csv(const std::string& path);

}  // namespace flowsep
