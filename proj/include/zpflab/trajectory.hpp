#pragma once

// Integration of the order-reduced radiating-particle equation
//   m x'' = f(x) + e E(t) + tau f'(x) x'
// with classical RK4, the field evaluated exactly at every stage time.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zpflab/field.hpp"
#include "zpflab/potential.hpp"
#include "zpflab/response.hpp"

namespace zpflab::sim {

enum class Integrator { rk4 };

struct SimConfig {
  double dt = 0.05;
  // Total integrated time, burn-in included.
  double t_total = 1000.0;
  double t_burn = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_trajectories = 1;
  Integrator integrator = Integrator::rk4;
  double x0 = 0.0;
  double p0 = 0.0;

  void validate() const;
};

struct Trajectory {
  std::vector<double> t, x, p;
  std::size_t size() const { return t.size(); }
};

// Throws ResolutionError if dt >= 2 pi / (16 omega_max), where omega_max is
// the larger of the bath's top mode and omega0; DivergenceError if the energy
// exceeds 1e6 times its reference scale or becomes non-finite.
Trajectory integrate(const response::OscillatorParams& params, const Potential& pot,
                     const field::FieldRealization& field, const SimConfig& config);

// Same integration without storing: visit(t, x, p) for every post-burn sample.
void integrate_visit(const response::OscillatorParams& params, const Potential& pot,
                     const field::FieldRealization& field, const SimConfig& config,
                     const std::function<void(double, double, double)>& visit);

struct MomentReport {
  std::size_t n_trajectories = 0;
  double mean_x = 0.0, stderr_x = 0.0;
  double mean_x2 = 0.0, stderr_x2 = 0.0;
  double mean_p2 = 0.0, stderr_p2 = 0.0;
  // <x^2> over the first and second halves of the post-burn window.
  double first_half_x2 = 0.0, first_half_stderr = 0.0;
  double second_half_x2 = 0.0, second_half_stderr = 0.0;
  std::string config_hash;
};

// One independent realization per trajectory, seeded by derive_seed(config.seed, i).
// Requires n_trajectories >= 2 and, for gamma > 0, t_burn >= 5 / gamma.
MomentReport ensemble_moments(const response::OscillatorParams& params, const Potential& pot,
                              const SimConfig& config, const field::SpectrumConfig& spectrum);

std::string config_hash(const response::OscillatorParams& params, const Potential& pot,
                        const SimConfig& config, const field::SpectrumConfig& spectrum);

// JSON with mean_x, var_x (= <x^2>), var_p (= <p^2>), stderr_x2, stderr_p2,
// n_trajectories, config_hash and the half-window stationarity data.
nlohmann::json to_json(const MomentReport& report);

struct PsdOptions {
  // Segment length in samples; 0 means the whole trajectory as one segment.
  std::size_t segment = 0;
  double overlap = 0.5;
  // Resonance used for the minimum-length check (segment >= 10 periods).
  double reference_omega = 1.0;
};

struct PsdPoint {
  double omega;
  double power;
};

// Welch estimate (Hann window, mean removed per segment) of the one-sided
// power spectral density of x(t) in angular frequency, normalized so that
// sum power * d_omega approximates the variance of x.
std::vector<PsdPoint> psd(const Trajectory& traj, const PsdOptions& options = {});
std::vector<PsdPoint> psd(const std::vector<double>& x, double dt, const PsdOptions& options = {});

// Averages spectra with identical frequency grids.
std::vector<PsdPoint> average_psd(const std::vector<std::vector<PsdPoint>>& spectra);

struct LineShape {
  double peak_omega;
  double peak_power;
  // Full width at half maximum, half-max crossings linearly interpolated.
  double fwhm;
  double bin_width;
};

LineShape analyze_line(const std::vector<PsdPoint>& spectrum);

}  // namespace zpflab::sim
