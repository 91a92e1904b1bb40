#include "zpflab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "zpflab/error.hpp"
#include "zpflab/format.hpp"
#include "zpflab/parallel.hpp"
#include "zpflab/rng.hpp"

namespace zpflab::sim {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t steps_for(double duration, double dt) {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

struct MeanError {
  double mean, error;
};

MeanError mean_and_error(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sim: dt must be > 0");
  if (!(t_burn >= 0.0) || !(t_total > t_burn)) throw ConfigError("sim: require 0 <= t_burn < t_total");
  if (n_trajectories < 1) throw ConfigError("sim: n_trajectories must be >= 1");
  if (!std::isfinite(x0) || !std::isfinite(p0)) throw ConfigError("sim: initial conditions must be finite");
}

void integrate_visit(const response::OscillatorParams& params, const Potential& pot,
                     const field::FieldRealization& field, const SimConfig& config,
                     const std::function<void(double, double, double)>& visit) {
  params.validate();
  config.validate();
  double omega_max = params.omega0;
  if (!field.modes.empty()) omega_max = std::max(omega_max, field.modes.back().omega);
  if (!(config.dt < 2.0 * kPi / (16.0 * omega_max))) {
    throw ResolutionError("integrate: dt must be below 2 pi / (16 omega_max)");
  }

  const double m = params.m;
  const double charge = params.e;
  const double tau = params.tau;
  auto accel = [&](double x, double p, double e_field) {
    return pot.force(x) + charge * e_field + tau * pot.force_derivative(x) * p / m;
  };
  auto energy = [&](double x, double p) { return 0.5 * p * p / m + pot.value(x); };

  const double dt = config.dt;
  const std::size_t n_steps = steps_for(config.t_total, dt);
  const std::size_t burn = steps_for(config.t_burn, dt);
  double x = config.x0;
  double p = config.p0;
  const double scale = std::max(std::abs(energy(x, p)), params.hbar * params.omega0);

  field::UniformFieldSampler sampler(field.modes, 0.0, 0.5 * dt);
  double e_start = sampler.next();
  for (std::size_t s = 0;; ++s) {
    if (s >= burn) visit(static_cast<double>(s) * dt, x, p);
    if (s == n_steps) break;

    const double e_mid = sampler.next();
    const double e_end = sampler.next();
    const double k1x = p / m, k1p = accel(x, p, e_start);
    const double x2 = x + 0.5 * dt * k1x, p2 = p + 0.5 * dt * k1p;
    const double k2x = p2 / m, k2p = accel(x2, p2, e_mid);
    const double x3 = x + 0.5 * dt * k2x, p3 = p + 0.5 * dt * k2p;
    const double k3x = p3 / m, k3p = accel(x3, p3, e_mid);
    const double x4 = x + dt * k3x, p4 = p + dt * k3p;
    const double k4x = p4 / m, k4p = accel(x4, p4, e_end);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    e_start = e_end;

    const double h = energy(x, p);
    if (!std::isfinite(h) || h > 1e6 * scale) {
      throw DivergenceError("integrate: energy left the stable range at t = " +
                            format_number(static_cast<double>(s + 1) * dt));
    }
  }
}

Trajectory integrate(const response::OscillatorParams& params, const Potential& pot,
                     const field::FieldRealization& field, const SimConfig& config) {
  Trajectory traj;
  const std::size_t expected = steps_for(config.t_total, config.dt) - steps_for(config.t_burn, config.dt) + 1;
  traj.t.reserve(expected);
  traj.x.reserve(expected);
  traj.p.reserve(expected);
  integrate_visit(params, pot, field, config, [&](double t, double x, double p) {
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.p.push_back(p);
  });
  return traj;
}

std::string config_hash(const response::OscillatorParams& params, const Potential& pot,
                        const SimConfig& config, const field::SpectrumConfig& spectrum) {
  std::string s;
  auto add = [&s](const char* key, const std::string& v) { s += std::string(key) + "=" + v + "\n"; };
  add("m", format_number(params.m));
  add("e", format_number(params.e));
  add("omega0", format_number(params.omega0));
  add("tau", format_number(params.tau));
  add("hbar", format_number(params.hbar));
  add("potential", pot.describe());
  add("dt", format_number(config.dt));
  add("t_total", format_number(config.t_total));
  add("t_burn", format_number(config.t_burn));
  add("seed", std::to_string(config.seed));
  add("n_trajectories", std::to_string(config.n_trajectories));
  add("x0", format_number(config.x0));
  add("p0", format_number(config.p0));
  add("omega_min", format_number(spectrum.omega_min));
  add("omega_max", format_number(spectrum.omega_max));
  add("n_modes", std::to_string(spectrum.n_modes));
  add("spectrum_hbar", format_number(spectrum.hbar));
  add("grid", field::to_string(spectrum.grid));
  return hex64(fnv1a64(s));
}

MomentReport ensemble_moments(const response::OscillatorParams& params, const Potential& pot,
                              const SimConfig& config, const field::SpectrumConfig& spectrum) {
  params.validate();
  config.validate();
  spectrum.validate();
  if (config.n_trajectories < 2) throw ConfigError("ensemble_moments: n_trajectories must be >= 2");
  const double gamma = params.gamma();
  if (gamma > 0.0 && config.t_burn < 5.0 / gamma * (1.0 - 1e-12)) {
    throw ConfigError("ensemble_moments: t_burn must be >= 5 / gamma");
  }

  const std::size_t n = config.n_trajectories;
  const std::size_t samples = steps_for(config.t_total, config.dt) - steps_for(config.t_burn, config.dt) + 1;
  const std::size_t half = samples / 2;
  std::vector<double> mx(n), mx2(n), mp2(n), h1(n), h2(n);
  parallel_for(n, [&](std::size_t i) {
    const auto field = field::sample_zpf(spectrum, derive_seed(config.seed, i));
    double sx = 0.0, sx2 = 0.0, sp2 = 0.0, s1 = 0.0, s2 = 0.0;
    std::size_t k = 0;
    integrate_visit(params, pot, field, config, [&](double, double x, double p) {
      sx += x;
      sx2 += x * x;
      sp2 += p * p;
      (k < half ? s1 : s2) += x * x;
      ++k;
    });
    const auto total = static_cast<double>(k);
    mx[i] = sx / total;
    mx2[i] = sx2 / total;
    mp2[i] = sp2 / total;
    h1[i] = s1 / static_cast<double>(half);
    h2[i] = s2 / static_cast<double>(k - half);
  });

  MomentReport report;
  report.n_trajectories = n;
  const auto ax = mean_and_error(mx), ax2 = mean_and_error(mx2), ap2 = mean_and_error(mp2);
  const auto a1 = mean_and_error(h1), a2 = mean_and_error(h2);
  report.mean_x = ax.mean;
  report.stderr_x = ax.error;
  report.mean_x2 = ax2.mean;
  report.stderr_x2 = ax2.error;
  report.mean_p2 = ap2.mean;
  report.stderr_p2 = ap2.error;
  report.first_half_x2 = a1.mean;
  report.first_half_stderr = a1.error;
  report.second_half_x2 = a2.mean;
  report.second_half_stderr = a2.error;
  report.config_hash = config_hash(params, pot, config, spectrum);
  return report;
}

nlohmann::json to_json(const MomentReport& r) {
  return {{"mean_x", r.mean_x},
          {"stderr_x", r.stderr_x},
          {"var_x", r.mean_x2},
          {"var_p", r.mean_p2},
          {"stderr_x2", r.stderr_x2},
          {"stderr_p2", r.stderr_p2},
          {"first_half_x2", r.first_half_x2},
          {"first_half_stderr", r.first_half_stderr},
          {"second_half_x2", r.second_half_x2},
          {"second_half_stderr", r.second_half_stderr},
          {"n_trajectories", r.n_trajectories},
          {"config_hash", r.config_hash}};
}

std::vector<PsdPoint> psd(const std::vector<double>& x, double dt, const PsdOptions& options) {
  const std::size_t len = options.segment == 0 ? x.size() : options.segment;
  if (len < 16 || len > x.size()) throw ConfigError("psd: segment must be between 16 samples and the trajectory length");
  if (!(options.overlap >= 0.0 && options.overlap < 1.0)) throw ConfigError("psd: overlap must be in [0, 1)");
  if (static_cast<double>(len) * dt < 10.0 * 2.0 * kPi / options.reference_omega) {
    throw ResolutionError("psd: segment shorter than 10 resonance periods");
  }

  std::vector<double> window(len);
  double u = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(len)));
    u += window[i] * window[i];
  }
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(len) * (1.0 - options.overlap))));

  const std::size_t n_bins = len / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  std::size_t n_segments = 0;
  std::vector<std::complex<double>> buf(len);
  for (std::size_t start = 0; start + len <= x.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < len; ++i) mean += x[start + i];
    mean /= static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) buf[i] = (x[start + i] - mean) * window[i];
    detail::fft_inplace(buf, detail::FftSign::forward);
    for (std::size_t k = 0; k < n_bins; ++k) acc[k] += std::norm(buf[k]);
    ++n_segments;
  }

  std::vector<PsdPoint> out(n_bins);
  const double d_omega = 2.0 * kPi / (static_cast<double>(len) * dt);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const bool interior = k > 0 && !(len % 2 == 0 && k == len / 2);
    const double one_sided = interior ? 2.0 : 1.0;
    out[k] = {static_cast<double>(k) * d_omega,
              one_sided * dt * acc[k] / (u * 2.0 * kPi * static_cast<double>(n_segments))};
  }
  return out;
}

std::vector<PsdPoint> psd(const Trajectory& traj, const PsdOptions& options) {
  if (traj.size() < 2) throw ConfigError("psd: trajectory too short");
  return psd(traj.x, traj.t[1] - traj.t[0], options);
}

std::vector<PsdPoint> average_psd(const std::vector<std::vector<PsdPoint>>& spectra) {
  if (spectra.empty()) return {};
  std::vector<PsdPoint> out = spectra.front();
  for (std::size_t s = 1; s < spectra.size(); ++s) {
    if (spectra[s].size() != out.size()) throw ShapeError("average_psd: frequency grids differ");
    for (std::size_t k = 0; k < out.size(); ++k) out[k].power += spectra[s][k].power;
  }
  for (auto& pt : out) pt.power /= static_cast<double>(spectra.size());
  return out;
}

LineShape analyze_line(const std::vector<PsdPoint>& spectrum) {
  if (spectrum.size() < 3) throw ConfigError("analyze_line: spectrum too short");
  std::size_t peak = 1;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (spectrum[k].power > spectrum[peak].power) peak = k;
  }
  const double half = 0.5 * spectrum[peak].power;
  auto crossing = [&](std::size_t a, std::size_t b) {
    const double f = (half - spectrum[a].power) / (spectrum[b].power - spectrum[a].power);
    return spectrum[a].omega + f * (spectrum[b].omega - spectrum[a].omega);
  };
  double lo = std::nan(""), hi = std::nan("");
  for (std::size_t k = peak; k > 0; --k) {
    if (spectrum[k - 1].power < half) {
      lo = crossing(k - 1, k);
      break;
    }
  }
  for (std::size_t k = peak; k + 1 < spectrum.size(); ++k) {
    if (spectrum[k + 1].power < half) {
      hi = crossing(k, k + 1);
      break;
    }
  }
  return {spectrum[peak].omega, spectrum[peak].power, hi - lo, spectrum[1].omega - spectrum[0].omega};
}

}  // namespace zpflab::sim
