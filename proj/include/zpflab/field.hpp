#pragma once

// Discrete random-phase realizations of the zero-point field.
//
// A realization is a finite bath of cosine modes
//   E(t) = sum_j A_j cos(omega_j t + phi_j),
// with A_j = 2 |E~(omega_j)| sqrt(d omega_j), |E~(omega)| = sqrt(hbar |omega| / 2) / (2 pi).
// This choice reproduces the continuum two-point function
//   <E(t) E(t')> = 2 int_0^inf |E~|^2 cos(omega (t - t')) d omega
// as the bin widths shrink.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace zpflab::field {

enum class Grid { uniform, log_uniform };

std::string to_string(Grid grid);
Grid grid_from_string(const std::string& name);

struct SpectrumConfig {
  double omega_min = 0.2;
  double omega_max = 5.0;
  std::size_t n_modes = 4096;
  double hbar = 1.0;
  Grid grid = Grid::uniform;

  // Throws ConfigError.
  void validate() const;
};

// Band [omega0 / 5, 5 omega0] around a resonance.
SpectrumConfig band_around(double omega0, std::size_t n_modes, double hbar = 1.0);

struct FieldMode {
  double omega = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

struct FieldRealization {
  std::vector<FieldMode> modes;
  SpectrumConfig config;
  std::uint64_t seed = 0;
};

// Deterministic part of the discretization: bin centres and widths.
struct ModeBin {
  double omega;
  double width;
};
std::vector<ModeBin> mode_bins(const SpectrumConfig& config);

// |E~(omega)| of the continuum spectrum.
double spectral_magnitude(double omega, double hbar);

// A_j for a bin of centre omega and width d_omega.
double mode_amplitude(double omega, double d_omega, double hbar);

FieldRealization sample_zpf(const SpectrumConfig& config, std::uint64_t seed);

double evaluate_field(const FieldRealization& real, double t);
double evaluate_field(std::span<const FieldMode> modes, double t);

double mode_energy(const FieldMode& mode, double hbar);

// Sequential evaluation on t0, t0 + h, t0 + 2h, ... by rotating one phasor
// per mode. Phasors are recomputed from cos/sin every `resync` steps, so the
// values match evaluate_field to rounding.
class UniformFieldSampler {
 public:
  UniformFieldSampler(std::span<const FieldMode> modes, double t0, double h,
                      std::size_t resync = 1024);

  // Field at the current node; advances to the next node.
  double next();
  double time() const { return t0_ + static_cast<double>(step_) * h_; }

 private:
  void reset_phasors();

  std::vector<double> omega_, amplitude_, phase_;
  std::vector<double> re_, im_, rot_re_, rot_im_;
  double t0_, h_;
  std::size_t resync_;
  std::size_t step_ = 0;
};

struct CorrelationOptions {
  std::uint64_t seed = 0;
  double t_start = 0.0;
  double window = 100.0;
  std::size_t n_samples = 64;
};

struct CorrelationEstimate {
  double lag;
  double value;
  double standard_error;
};

// Ensemble (over independent realizations) and time (over a window) average
// of E(t) E(t + lag). Standard errors come from the spread across realizations.
std::vector<CorrelationEstimate> estimate_correlation(const SpectrumConfig& config,
                                                      std::size_t n_realizations,
                                                      std::span<const double> lags,
                                                      const CorrelationOptions& options = {});

// Closed-form expectation of the estimator for the discrete bath:
// sum_j A_j^2 / 2 cos(omega_j lag).
double discrete_correlation(const SpectrumConfig& config, double lag);

// Continuum limit over [omega_min, omega_max]:
// (hbar / 4 pi^2) int omega cos(omega lag) d omega.
double continuum_correlation(const SpectrumConfig& config, double lag);

nlohmann::json to_json(const FieldRealization& real);
FieldRealization realization_from_json(const nlohmann::json& doc);

}  // namespace zpflab::field
