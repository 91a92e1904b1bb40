#include "zpflab/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zpflab/error.hpp"
#include "zpflab/parallel.hpp"
#include "zpflab/rng.hpp"

namespace zpflab::field {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(Grid grid) {
  return grid == Grid::uniform ? "uniform" : "log-uniform";
}

Grid grid_from_string(const std::string& name) {
  if (name == "uniform") return Grid::uniform;
  if (name == "log-uniform" || name == "log_uniform") return Grid::log_uniform;
  throw ConfigError("unknown spectrum grid '" + name + "' (expected uniform or log-uniform)");
}

void SpectrumConfig::validate() const {
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || !std::isfinite(omega_max)) {
    throw ConfigError("spectrum: require 0 < omega_min < omega_max");
  }
  if (n_modes < 1) throw ConfigError("spectrum: n_modes must be >= 1");
  if (!(hbar >= 0.0) || !std::isfinite(hbar)) throw ConfigError("spectrum: hbar must be >= 0");
}

SpectrumConfig band_around(double omega0, std::size_t n_modes, double hbar) {
  return SpectrumConfig{omega0 / 5.0, 5.0 * omega0, n_modes, hbar, Grid::uniform};
}

std::vector<ModeBin> mode_bins(const SpectrumConfig& config) {
  config.validate();
  std::vector<ModeBin> bins(config.n_modes);
  const auto n = static_cast<double>(config.n_modes);
  if (config.grid == Grid::uniform) {
    const double width = (config.omega_max - config.omega_min) / n;
    for (std::size_t j = 0; j < config.n_modes; ++j) {
      bins[j] = {config.omega_min + (static_cast<double>(j) + 0.5) * width, width};
    }
  } else {
    const double ratio = config.omega_max / config.omega_min;
    for (std::size_t j = 0; j < config.n_modes; ++j) {
      const double lo = config.omega_min * std::pow(ratio, static_cast<double>(j) / n);
      const double hi = config.omega_min * std::pow(ratio, static_cast<double>(j + 1) / n);
      bins[j] = {std::sqrt(lo * hi), hi - lo};
    }
  }
  return bins;
}

double spectral_magnitude(double omega, double hbar) {
  return std::sqrt(hbar * std::abs(omega) / 2.0) / (2.0 * kPi);
}

double mode_amplitude(double omega, double d_omega, double hbar) {
  return std::sqrt(hbar * omega * d_omega / 2.0) / kPi;
}

FieldRealization sample_zpf(const SpectrumConfig& config, std::uint64_t seed) {
  FieldRealization real;
  real.config = config;
  real.seed = seed;
  const auto bins = mode_bins(config);
  real.modes.reserve(bins.size());
  for (std::size_t j = 0; j < bins.size(); ++j) {
    real.modes.push_back({bins[j].omega, mode_amplitude(bins[j].omega, bins[j].width, config.hbar),
                          counter_phase(seed, j)});
  }
  return real;
}

double evaluate_field(std::span<const FieldMode> modes, double t) {
  double sum = 0.0;
  for (const auto& m : modes) sum += m.amplitude * std::cos(m.omega * t + m.phase);
  return sum;
}

double evaluate_field(const FieldRealization& real, double t) {
  return evaluate_field(std::span<const FieldMode>(real.modes), t);
}

double mode_energy(const FieldMode& mode, double hbar) { return 0.5 * hbar * mode.omega; }

UniformFieldSampler::UniformFieldSampler(std::span<const FieldMode> modes, double t0, double h,
                                         std::size_t resync)
    : t0_(t0), h_(h), resync_(std::max<std::size_t>(resync, 1)) {
  const std::size_t n = modes.size();
  omega_.resize(n);
  amplitude_.resize(n);
  phase_.resize(n);
  re_.resize(n);
  im_.resize(n);
  rot_re_.resize(n);
  rot_im_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    omega_[j] = modes[j].omega;
    amplitude_[j] = modes[j].amplitude;
    phase_[j] = modes[j].phase;
    rot_re_[j] = std::cos(omega_[j] * h);
    rot_im_[j] = std::sin(omega_[j] * h);
  }
  reset_phasors();
}

void UniformFieldSampler::reset_phasors() {
  const double t = time();
  for (std::size_t j = 0; j < omega_.size(); ++j) {
    const double arg = omega_[j] * t + phase_[j];
    re_[j] = amplitude_[j] * std::cos(arg);
    im_[j] = amplitude_[j] * std::sin(arg);
  }
}

double UniformFieldSampler::next() {
  const std::size_t n = omega_.size();
  double* re = re_.data();
  double* im = im_.data();
  const double* cr = rot_re_.data();
  const double* ci = rot_im_.data();
  double sum = 0.0;
#pragma omp simd reduction(+ : sum)
  for (std::size_t j = 0; j < n; ++j) {
    sum += re[j];
    const double r = re[j] * cr[j] - im[j] * ci[j];
    im[j] = re[j] * ci[j] + im[j] * cr[j];
    re[j] = r;
  }
  ++step_;
  if (step_ % resync_ == 0) reset_phasors();
  return sum;
}

std::vector<CorrelationEstimate> estimate_correlation(const SpectrumConfig& config,
                                                      std::size_t n_realizations,
                                                      std::span<const double> lags,
                                                      const CorrelationOptions& options) {
  config.validate();
  if (n_realizations < 2) throw ConfigError("estimate_correlation: n_realizations must be >= 2");
  if (options.n_samples < 1 || !(options.window > 0.0)) {
    throw ConfigError("estimate_correlation: need n_samples >= 1 and window > 0");
  }

  const std::size_t n_lags = lags.size();
  std::vector<double> per_real(n_realizations * n_lags, 0.0);
  parallel_for(n_realizations, [&](std::size_t r) {
    const auto real = sample_zpf(config, derive_seed(options.seed, r));
    const double step = options.window / static_cast<double>(options.n_samples);
    for (std::size_t i = 0; i < options.n_samples; ++i) {
      const double t = options.t_start + static_cast<double>(i) * step;
      const double e0 = evaluate_field(real, t);
      for (std::size_t l = 0; l < n_lags; ++l) {
        per_real[r * n_lags + l] += e0 * evaluate_field(real, t + lags[l]);
      }
    }
    for (std::size_t l = 0; l < n_lags; ++l) {
      per_real[r * n_lags + l] /= static_cast<double>(options.n_samples);
    }
  });

  std::vector<CorrelationEstimate> out(n_lags);
  const auto nr = static_cast<double>(n_realizations);
  for (std::size_t l = 0; l < n_lags; ++l) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n_realizations; ++r) mean += per_real[r * n_lags + l];
    mean /= nr;
    double ss = 0.0;
    for (std::size_t r = 0; r < n_realizations; ++r) {
      const double d = per_real[r * n_lags + l] - mean;
      ss += d * d;
    }
    out[l] = {lags[l], mean, std::sqrt(ss / (nr - 1.0) / nr)};
  }
  return out;
}

double discrete_correlation(const SpectrumConfig& config, double lag) {
  double sum = 0.0;
  for (const auto& bin : mode_bins(config)) {
    const double a = mode_amplitude(bin.omega, bin.width, config.hbar);
    sum += 0.5 * a * a * std::cos(bin.omega * lag);
  }
  return sum;
}

double continuum_correlation(const SpectrumConfig& config, double lag) {
  config.validate();
  const double pref = config.hbar / (4.0 * kPi * kPi);
  const double a = config.omega_min;
  const double b = config.omega_max;
  if (std::abs(lag) * b < 1e-6) return pref * 0.5 * (b * b - a * a);
  auto primitive = [lag](double w) {
    return w * std::sin(w * lag) / lag + std::cos(w * lag) / (lag * lag);
  };
  return pref * (primitive(b) - primitive(a));
}

nlohmann::json to_json(const FieldRealization& real) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : real.modes) {
    modes.push_back({{"omega", m.omega}, {"amplitude", m.amplitude}, {"phase", m.phase}});
  }
  return {{"seed", real.seed},
          {"config",
           {{"omega_min", real.config.omega_min},
            {"omega_max", real.config.omega_max},
            {"n_modes", real.config.n_modes},
            {"hbar", real.config.hbar},
            {"grid", to_string(real.config.grid)}}},
          {"modes", modes}};
}

FieldRealization realization_from_json(const nlohmann::json& doc) {
  FieldRealization real;
  try {
    real.seed = doc.at("seed").get<std::uint64_t>();
    const auto& c = doc.at("config");
    real.config.omega_min = c.at("omega_min").get<double>();
    real.config.omega_max = c.at("omega_max").get<double>();
    real.config.n_modes = c.at("n_modes").get<std::size_t>();
    real.config.hbar = c.at("hbar").get<double>();
    real.config.grid = grid_from_string(c.at("grid").get<std::string>());
    for (const auto& m : doc.at("modes")) {
      real.modes.push_back({m.at("omega").get<double>(), m.at("amplitude").get<double>(),
                            m.at("phase").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field realization: ") + e.what());
  }
  real.config.validate();
  if (real.modes.size() != real.config.n_modes) {
    throw ConfigError("field realization: mode count does not match config.n_modes");
  }
  for (std::size_t j = 0; j < real.modes.size(); ++j) {
    const auto& m = real.modes[j];
    if (!(m.omega > 0.0) || !(m.amplitude >= 0.0) || !(m.phase >= 0.0 && m.phase < 2.0 * kPi)) {
      throw ConfigError("field realization: mode " + std::to_string(j) + " violates invariants");
    }
    if (j > 0 && !(real.modes[j - 1].omega < m.omega)) {
      throw ConfigError("field realization: modes must be sorted by omega");
    }
  }
  return real;
}

}  // namespace zpflab::field
