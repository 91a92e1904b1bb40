#pragma once

// Linear response of a charged oscillator to the field: Lorentzian
// susceptibilities, their time-domain form, Kramers-Kronig reconstruction
// and the exact stationary moments of a harmonic oscillator in a discrete bath.

#include <complex>
#include <span>
#include <vector>

#include "zpflab/field.hpp"

namespace zpflab::response {

using Complex = std::complex<double>;

struct OscillatorParams {
  double m = 1.0;
  double e = 1.0;
  double omega0 = 1.0;
  double tau = 0.0;
  double hbar = 1.0;

  double gamma() const { return tau * omega0 * omega0; }

  static OscillatorParams from_q(double q, double omega0 = 1.0, double m = 1.0, double e = 1.0,
                                 double hbar = 1.0);

  void validate() const;
};

struct LorentzianResponse {
  double omega_k;
  double gamma_k;
};

class ResponseSet {
 public:
  ResponseSet() = default;
  // Sorts by omega_k; throws ConfigError on non-positive or repeated resonances.
  explicit ResponseSet(std::vector<LorentzianResponse> terms);

  static ResponseSet single(double omega_k, double gamma_k);

  const std::vector<LorentzianResponse>& terms() const { return terms_; }
  // True if any term is outside the narrow-line regime gamma_k < omega_k / 10.
  bool broad() const;

 private:
  std::vector<LorentzianResponse> terms_;
};

Complex chi(const ResponseSet& set, double omega);

struct TimeGrid {
  double t0;
  double dt;
  std::size_t n;

  double at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
};

struct ChiTimeResult {
  std::vector<double> values;
  // Largest |Im| of the inverse transform, relative to max |values|.
  double imag_residue;
};

// Inverse Fourier transform chi(t) = (1/2pi) int e^{-i omega t} chi~(omega) d omega
// on a uniform grid containing t = 0 as a node. The transform is taken of the
// frequency-periodized (aliased) spectrum, which is exactly the spectrum of the
// sampled sequence, on an internally padded grid long enough that time
// periodization is below 1e-8 of the peak.
// Throws ResolutionError if dt gives fewer than 16 samples per period of the
// fastest resonance or the grid spans less than 10 / min gamma_k.
ChiTimeResult chi_time(const ResponseSet& set, const TimeGrid& grid);

// max |chi(t < 0)| / max |chi| over the grid.
double causality_leak(const ChiTimeResult& result, const TimeGrid& grid);

// Principal-value Kramers-Kronig reconstruction of Re chi from Im chi sampled
// on a uniform grid of non-negative frequencies. Negative frequencies are
// filled with the odd extension Im chi(-omega) = -Im chi(omega); the Hilbert
// transform uses the odd-offset discrete kernel applied by FFT convolution.
// Throws DomainError if |Im chi| at either end exceeds 1e-3 of its peak.
std::vector<double> kk_reconstruct(std::span<const double> omega, std::span<const double> im_chi);

struct KkPoint {
  double omega, re_chi, im_chi, re_chi_rec, abs_err;
};

struct KkScan {
  std::vector<KkPoint> points;
  // max |Re chi_rec - Re chi| / max |Re chi|
  double relative_residual;
};

// Samples chi on [omega_min, omega_max] with n points, reconstructs Re chi from
// Im chi and compares against the analytic real part.
KkScan kk_scan(const ResponseSet& set, double omega_min, double omega_max, std::size_t n);

// Q = 1 / (tau omega0); +infinity when tau = 0.
double q_factor(const OscillatorParams& params);

struct Moments {
  double x2;
  double p2;
};

// Exact second moments of the stationary response to the discrete bath:
// <x^2> = (e/m)^2 sum_j A_j^2/2 |chi(omega_j)|^2 and <p^2> = m^2 (e/m)^2 sum_j A_j^2/2 omega_j^2 |chi|^2.
// The config overload throws ResolutionError unless at least 20 modes lie
// within one linewidth gamma of omega0.
Moments stationary_moments(const OscillatorParams& params, const field::SpectrumConfig& config);
Moments stationary_moments(const OscillatorParams& params, std::span<const field::FieldMode> modes);

// Narrow-line closed form (e/m)^2 (hbar omega0 / 4 pi^2) (pi / (2 omega0^2 gamma)).
double narrow_line_x2(const OscillatorParams& params);

// x_nk = (e / (2 pi m)) sqrt(hbar |omega_kn| / 2) chi_nk.
Complex narrowband_coefficient(Complex chi_nk, double omega_kn, const OscillatorParams& params);

}  // namespace zpflab::response
