#include "flowsep/freqdata.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include "flowsep/errors.hpp"
#include "flowsep/textio.hpp"

namespace flowsep {
namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Real-to-complex transform of fixed length with owned buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    if (!in_ || !out_) throw NumericalError("FFT buffer allocation failed");
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    if (plan_ == nullptr) throw NumericalError("FFT planning failed");
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_.get(); }
  void execute() { fftw_execute(plan_); }
  cdouble bin(std::size_t k) const { return {out_.get()[k][0], out_.get()[k][1]}; }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_ = nullptr;
};

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
}

}  // namespace

void TimeSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time series dt must be > 0");
  if (values.empty()) throw ConfigError("time series is empty");
  check_finite(t0, "time series t0");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ConfigError("time series value at index " + std::to_string(i) + " is not finite");
    }
  }
}

FrequencyResponseSet::FrequencyResponseSet(std::vector<FrequencySample> samples)
    : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw ConfigError("frequency response needs at least 2 samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.omega > 0.0) || !std::isfinite(s.omega)) {
      throw ConfigError("frequency sample " + std::to_string(i) + " has non-positive omega");
    }
    if (!std::isfinite(s.value.real()) || !std::isfinite(s.value.imag())) {
      throw ConfigError("frequency sample " + std::to_string(i) + " has a non-finite value");
    }
    if (i > 0 && !(s.omega > samples_[i - 1].omega)) {
      throw ConfigError("frequency samples must be strictly increasing in omega (index " +
                        std::to_string(i) + ")");
    }
  }
}

std::vector<double> FrequencyResponseSet::omegas() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.omega);
  return out;
}

std::vector<cdouble> FrequencyResponseSet::values() const {
  std::vector<cdouble> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.value);
  return out;
}

void SweepConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("sweep config: " + m); };
  if (!(fs > 0.0)) fail("fs must be > 0");
  if (!(f_min > 0.0)) fail("f_min must be > 0");
  if (f_max < f_min) fail("f_max must be >= f_min");
  if (!(f_max < fs / 2.0)) fail("f_max must be below fs/2");
  if (!(duration > 0.0)) fail("duration must be > 0");
  if (amplitude < 0.0) fail("amplitude must be >= 0");
  if (offset - amplitude < 0.0) fail("offset - amplitude must be >= 0");
  if (offset + amplitude > 1.0) fail("offset + amplitude must be <= 1");
}

namespace {

double sweep_rate(const SweepConfig& cfg) { return std::log(cfg.f_max / cfg.f_min) / cfg.duration; }

}  // namespace

double sweep_instantaneous_frequency(const SweepConfig& cfg, double t) {
  return cfg.f_min * std::exp(sweep_rate(cfg) * t);
}

TimeSeries generate_log_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(std::llround(cfg.duration * cfg.fs));
  if (n == 0) throw ConfigError("sweep config: duration*fs rounds to zero samples");
  const double K = sweep_rate(cfg);
  const double two_pi = 2.0 * std::numbers::pi;
  TimeSeries ts;
  ts.t0 = 0.0;
  ts.dt = 1.0 / cfg.fs;
  ts.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.fs;
    const double phase =
        K == 0.0 ? two_pi * cfg.f_min * t : two_pi * cfg.f_min * std::expm1(K * t) / K;
    ts.values[i] = cfg.offset + cfg.amplitude * std::sin(phase);
  }
  return ts;
}

FrequencyResponseSet estimate_frf(const TimeSeries& u, const TimeSeries& y, std::size_t n_out,
                                  double band_lo_hz, double band_hi_hz, const FrfOptions& opts) {
  u.validate();
  y.validate();
  if (u.size() != y.size()) {
    throw DimensionError("estimate_frf: input has " + std::to_string(u.size()) +
                         " samples, output has " + std::to_string(y.size()));
  }
  if (std::abs(u.dt - y.dt) > 1e-12 * u.dt) {
    throw DimensionError("estimate_frf: input and output sample periods differ");
  }
  if (n_out == 0) throw ConfigError("estimate_frf: n_out must be >= 1");
  const double fs = 1.0 / u.dt;
  if (!(band_lo_hz > 0.0) || !(band_hi_hz < fs / 2.0) || band_hi_hz < band_lo_hz) {
    throw ConfigError("estimate_frf: band must satisfy 0 < lo <= hi < fs/2");
  }
  if (!(opts.overlap >= 0.0 && opts.overlap < 1.0)) {
    throw ConfigError("estimate_frf: overlap must be in [0, 1)");
  }

  const std::size_t n = u.size();
  const std::size_t nseg = std::min(opts.segment_length, n);
  if (nseg < 8) throw ConfigError("estimate_frf: record too short for spectral estimation");
  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(static_cast<double>(nseg) * (1.0 - opts.overlap))));

  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + nseg <= n; s += step) starts.push_back(s);
  // Anchor a final segment on the record end so the tail is covered.
  if (starts.back() != n - nseg) starts.push_back(n - nseg);

  double mu = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u.values[i];
    my += y.values[i];
  }
  mu /= static_cast<double>(n);
  my /= static_cast<double>(n);

  std::vector<double> win(nseg);
  for (std::size_t i = 0; i < nseg; ++i) {
    win[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(nseg - 1));
  }

  const std::size_t nbins = nseg / 2 + 1;
  std::vector<double> suu(nbins, 0.0);
  std::vector<cdouble> syu(nbins, 0.0);
  RealFft fu(nseg), fy(nseg);
  for (const std::size_t s : starts) {
    for (std::size_t i = 0; i < nseg; ++i) {
      fu.input()[i] = win[i] * (u.values[s + i] - mu);
      fy.input()[i] = win[i] * (y.values[s + i] - my);
    }
    fu.execute();
    fy.execute();
    for (std::size_t k = 0; k < nbins; ++k) {
      const cdouble U = fu.bin(k);
      suu[k] += std::norm(U);
      syu[k] += fy.bin(k) * std::conj(U);
    }
  }

  std::set<std::size_t> bins;
  for (std::size_t j = 0; j < n_out; ++j) {
    const double f = n_out == 1 ? band_lo_hz
                                : band_lo_hz * std::pow(band_hi_hz / band_lo_hz,
                                                        static_cast<double>(j) /
                                                            static_cast<double>(n_out - 1));
    auto b = static_cast<std::size_t>(std::llround(f * static_cast<double>(nseg) / fs));
    b = std::clamp<std::size_t>(b, 1, nbins - 1);
    bins.insert(b);
  }

  const double suu_max = *std::max_element(suu.begin() + 1, suu.end());
  const double floor = std::numeric_limits<double>::epsilon() * suu_max;
  std::vector<FrequencySample> out;
  out.reserve(bins.size());
  for (const std::size_t b : bins) {
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(b) * fs /
                         static_cast<double>(nseg);
    if (!(suu[b] > floor)) {
      std::ostringstream msg;
      msg << "unexcited frequency: input auto-spectrum vanishes at " << omega / (2 * std::numbers::pi)
          << " Hz";
      throw UnexcitedFrequencyError(msg.str());
    }
    out.push_back({omega, syu[b] / suu[b]});
  }
  if (out.size() < 2) {
    throw ConfigError("estimate_frf: requested band collapses to fewer than 2 FFT bins");
  }
  return FrequencyResponseSet(std::move(out));
}

double normalize_voltage(double u, double u_min, double u_max) {
  if (!(u_max > u_min)) throw RangeError("normalize_voltage: degenerate range, need u_max > u_min");
  return (u - u_min) / (u_max - u_min);
}

TimeSeries normalize_voltage(const TimeSeries& series, double u_min, double u_max) {
  if (!(u_max > u_min)) throw RangeError("normalize_voltage: degenerate range, need u_max > u_min");
  TimeSeries out = series;
  for (auto& v : out.values) v = (v - u_min) / (u_max - u_min);
  return out;
}

void write_time_series_csv(const std::string& path, const TimeSeries& ts) {
  CsvTable t;
  t.header = {"t", "value"};
  t.rows.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) t.rows.push_back({ts.time(i), ts.values[i]});
  write_csv(path, t);
}

TimeSeries read_time_series_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const auto tc = t.column("t");
  const auto vc = t.column("value");
  if (t.rows.size() < 2) throw ConfigError(path + ": time series needs at least 2 rows");
  TimeSeries ts;
  ts.t0 = t.rows.front()[tc];
  ts.dt = (t.rows.back()[tc] - ts.t0) / static_cast<double>(t.rows.size() - 1);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double d = t.rows[i][tc] - t.rows[i - 1][tc];
    if (std::abs(d - ts.dt) > 1e-6 * ts.dt) {
      throw ConfigError(path + ": time column is not uniformly spaced");
    }
  }
  ts.values.reserve(t.rows.size());
  for (const auto& r : t.rows) ts.values.push_back(r[vc]);
  ts.validate();
  return ts;
}

void write_frf_csv(const std::string& path, const FrequencyResponseSet& frf) {
  CsvTable t;
  t.header = {"omega_rad_s", "re", "im"};
  for (const auto& s : frf.samples()) t.rows.push_back({s.omega, s.value.real(), s.value.imag()});
  write_csv(path, t);
}

FrequencyResponseSet read_frf_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const auto oc = t.column("omega_rad_s");
  const auto rc = t.column("re");
  const auto ic = t.column("im");
  std::vector<FrequencySample> s;
  for (const auto& r : t.rows) s.push_back({r[oc], {r[rc], r[ic]}});
  return FrequencyResponseSet(std::move(s));
}

}  // namespace flowsep
