#include "zpflab/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "zpflab/error.hpp"

namespace zpflab::response {

namespace {
constexpr double kPi = std::numbers::pi;
}

OscillatorParams OscillatorParams::from_q(double q, double omega0, double m, double e,
                                          double hbar) {
  if (!(q > 0.0)) throw ConfigError("oscillator: Q must be > 0");
  return {m, e, omega0, 1.0 / (q * omega0), hbar};
}

void OscillatorParams::validate() const {
  if (!(m > 0.0) || !(omega0 > 0.0) || !(hbar > 0.0)) {
    throw ConfigError("oscillator: m, omega0 and hbar must be > 0");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("oscillator: tau must be >= 0");
  if (!std::isfinite(e)) throw ConfigError("oscillator: charge must be finite");
}

ResponseSet::ResponseSet(std::vector<LorentzianResponse> terms) : terms_(std::move(terms)) {
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return a.omega_k < b.omega_k; });
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (!(terms_[k].omega_k > 0.0) || !(terms_[k].gamma_k >= 0.0)) {
      throw ConfigError("response: require omega_k > 0 and gamma_k >= 0");
    }
    if (k > 0 && terms_[k].omega_k == terms_[k - 1].omega_k) {
      throw ConfigError("response: resonances must be distinct");
    }
  }
}

ResponseSet ResponseSet::single(double omega_k, double gamma_k) {
  return ResponseSet({{omega_k, gamma_k}});
}

bool ResponseSet::broad() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return !(t.gamma_k < t.omega_k / 10.0); });
}

Complex chi(const ResponseSet& set, double omega) {
  Complex sum{0.0, 0.0};
  for (const auto& t : set.terms()) {
    sum += 1.0 / Complex(t.omega_k * t.omega_k - omega * omega, -t.gamma_k * omega);
  }
  return sum;
}

ChiTimeResult chi_time(const ResponseSet& set, const TimeGrid& grid) {
  if (set.terms().empty()) throw ConfigError("chi_time: empty response set");
  if (!(grid.dt > 0.0) || grid.n < 2) throw ConfigError("chi_time: need dt > 0 and n >= 2");

  double omega_fast = 0.0;
  double gamma_min = std::numeric_limits<double>::infinity();
  for (const auto& t : set.terms()) {
    if (!(t.gamma_k > 0.0) || !(t.gamma_k < 2.0 * t.omega_k)) {
      throw ConfigError("chi_time: require 0 < gamma_k < 2 omega_k");
    }
    omega_fast = std::max(omega_fast, t.omega_k);
    gamma_min = std::min(gamma_min, t.gamma_k);
  }
  if (grid.dt > 2.0 * kPi / (16.0 * omega_fast) * (1.0 + 1e-12)) {
    throw ResolutionError("chi_time: fewer than 16 samples per period of the fastest resonance");
  }
  if (static_cast<double>(grid.n) * grid.dt < 10.0 / gamma_min) {
    throw ResolutionError("chi_time: grid spans less than 10 / min gamma_k");
  }
  const double start = std::round(grid.t0 / grid.dt);
  if (std::abs(start * grid.dt - grid.t0) > 1e-9 * grid.dt) {
    throw ResolutionError("chi_time: t = 0 must be a grid node");
  }
  const auto first = static_cast<long long>(start);

  const auto pad = static_cast<std::size_t>(std::ceil(40.0 / (gamma_min * grid.dt)));
  const std::size_t big_m =
      detail::next_pow2(grid.n + static_cast<std::size_t>(std::llabs(first)) + pad);

  // Aliased spectrum sum_l chi~(omega + l W), W = 2 pi / dt, via
  // sum_l 1 / (z + l W) = (pi / W) cot(pi z / W) on each pole.
  const double w_period = 2.0 * kPi / grid.dt;
  const double d_omega = w_period / static_cast<double>(big_m);
  std::vector<Complex> spec(big_m, Complex{0.0, 0.0});
  for (const auto& t : set.terms()) {
    const Complex root = std::sqrt(Complex(t.omega_k * t.omega_k - 0.25 * t.gamma_k * t.gamma_k, 0.0));
    const Complex p1 = Complex(0.0, -0.5 * t.gamma_k) + root;
    const Complex p2 = Complex(0.0, -0.5 * t.gamma_k) - root;
    const Complex scale = -(kPi / w_period) / (p1 - p2);
    auto cot = [](Complex z) { return std::cos(z) / std::sin(z); };
    for (std::size_t m = 0; m < big_m; ++m) {
      const double w = static_cast<double>(m) * d_omega;
      spec[m] += scale * (cot(kPi * (w - p1) / w_period) - cot(kPi * (w - p2) / w_period));
    }
  }
  detail::fft_inplace(spec, detail::FftSign::forward);

  const double norm = 1.0 / (static_cast<double>(big_m) * grid.dt);
  ChiTimeResult out;
  out.values.resize(grid.n);
  double peak = 0.0, imag = 0.0;
  const auto mm = static_cast<long long>(big_m);
  for (std::size_t i = 0; i < grid.n; ++i) {
    long long idx = (first + static_cast<long long>(i)) % mm;
    if (idx < 0) idx += mm;
    const Complex v = spec[static_cast<std::size_t>(idx)] * norm;
    out.values[i] = v.real();
    peak = std::max(peak, std::abs(v.real()));
    imag = std::max(imag, std::abs(v.imag()));
  }
  out.imag_residue = peak > 0.0 ? imag / peak : imag;
  return out;
}

double causality_leak(const ChiTimeResult& result, const TimeGrid& grid) {
  double peak = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    const double a = std::abs(result.values[i]);
    peak = std::max(peak, a);
    if (grid.at(i) < -0.5 * grid.dt) neg = std::max(neg, a);
  }
  return peak > 0.0 ? neg / peak : 0.0;
}

std::vector<double> kk_reconstruct(std::span<const double> omega, std::span<const double> im_chi) {
  const std::size_t n = omega.size();
  if (n != im_chi.size()) throw ShapeError("kk_reconstruct: omega and im_chi lengths differ");
  if (n < 3) throw ConfigError("kk_reconstruct: need at least 3 samples");
  const double w0 = omega.front();
  const double step = (omega.back() - w0) / static_cast<double>(n - 1);
  if (!(w0 >= 0.0) || !(step > 0.0)) {
    throw ConfigError("kk_reconstruct: grid must be increasing over non-negative frequencies");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(omega[i] - (w0 + static_cast<double>(i) * step)) > 1e-6 * step) {
      throw ConfigError("kk_reconstruct: grid must be uniform");
    }
  }

  double peak = 0.0;
  for (double v : im_chi) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return std::vector<double>(n, 0.0);
  if (std::abs(im_chi.front()) > 1e-3 * peak || std::abs(im_chi.back()) > 1e-3 * peak) {
    throw DomainError("kk_reconstruct: Im chi at the grid boundary exceeds 1e-3 of its peak");
  }

  // Cosine taper over the outer 2% at each open edge.
  std::vector<double> data(im_chi.begin(), im_chi.end());
  const std::size_t edge = std::max<std::size_t>(n / 50, 1);
  for (std::size_t i = 0; i < edge; ++i) {
    const double w = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / static_cast<double>(edge)));
    data[n - 1 - i] *= w;
    if (w0 > 0.0) data[i] *= w;
  }

  auto interp = [&](double w) {
    const double pos = (w - w0) / step;
    if (pos < 0.0 || pos > static_cast<double>(n - 1)) return 0.0;
    const auto i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double frac = pos - static_cast<double>(i);
    return data[i] * (1.0 - frac) + data[i + 1] * frac;
  };

  // Extended grid u_j = w0 + j step, j = -left .. n-1, reaching -omega_max.
  const auto left = static_cast<std::size_t>(std::ceil((w0 + omega.back()) / step));
  const std::size_t len = left + n;
  const std::size_t big_m = detail::next_pow2(2 * len);
  std::vector<Complex> f(big_m, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < left; ++j) {
    const double u = w0 - static_cast<double>(left - j) * step;
    if (u <= -w0) f[j] = -interp(-u);
  }
  for (std::size_t i = 0; i < n; ++i) f[left + i] = data[i];

  // Re chi_i = (2 / pi) sum_{d odd} f_{i-d} / (-d): linear convolution with
  // an odd-offset kernel, laid out circularly for the FFT.
  std::vector<Complex> kernel(big_m, Complex{0.0, 0.0});
  for (std::size_t d = 1; d < len; d += 2) {
    const double v = -2.0 / (kPi * static_cast<double>(d));
    kernel[d] = v;
    kernel[big_m - d] = -v;
  }
  detail::fft_inplace(f, detail::FftSign::forward);
  detail::fft_inplace(kernel, detail::FftSign::forward);
  for (std::size_t k = 0; k < big_m; ++k) f[k] *= kernel[k];
  detail::fft_inplace(f, detail::FftSign::backward);

  std::vector<double> re(n);
  const double norm = 1.0 / static_cast<double>(big_m);
  for (std::size_t i = 0; i < n; ++i) re[i] = f[left + i].real() * norm;
  return re;
}

KkScan kk_scan(const ResponseSet& set, double omega_min, double omega_max, std::size_t n) {
  if (n < 3 || !(omega_max > omega_min)) throw ConfigError("kk_scan: invalid grid");
  std::vector<double> omega(n), im(n), re(n);
  for (std::size_t i = 0; i < n; ++i) {
    omega[i] = omega_min + (omega_max - omega_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    const Complex c = chi(set, omega[i]);
    re[i] = c.real();
    im[i] = c.imag();
  }
  const auto rec = kk_reconstruct(omega, im);
  KkScan scan;
  scan.points.reserve(n);
  double max_err = 0.0, max_re = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double err = std::abs(rec[i] - re[i]);
    scan.points.push_back({omega[i], re[i], im[i], rec[i], err});
    max_err = std::max(max_err, err);
    max_re = std::max(max_re, std::abs(re[i]));
  }
  scan.relative_residual = max_re > 0.0 ? max_err / max_re : max_err;
  return scan;
}

double q_factor(const OscillatorParams& params) {
  params.validate();
  if (params.tau == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (params.tau * params.omega0);
}

Moments stationary_moments(const OscillatorParams& params, std::span<const field::FieldMode> modes) {
  params.validate();
  const auto set = ResponseSet::single(params.omega0, params.gamma());
  const double coupling = params.e / params.m;
  double x2 = 0.0, p2 = 0.0;
  for (const auto& mode : modes) {
    const double resp = std::norm(chi(set, mode.omega));
    const double w = 0.5 * mode.amplitude * mode.amplitude * resp;
    x2 += w;
    p2 += w * mode.omega * mode.omega;
  }
  return {coupling * coupling * x2, params.m * params.m * coupling * coupling * p2};
}

Moments stationary_moments(const OscillatorParams& params, const field::SpectrumConfig& config) {
  params.validate();
  const double gamma = params.gamma();
  if (!(gamma > 0.0)) throw ResolutionError("stationary_moments: zero linewidth (tau = 0)");
  std::size_t inside = 0;
  for (const auto& bin : field::mode_bins(config)) {
    if (std::abs(bin.omega - params.omega0) <= gamma) ++inside;
  }
  if (inside < 20) {
    throw ResolutionError("stationary_moments: fewer than 20 bath modes within one linewidth of omega0");
  }
  // Amplitudes do not depend on the phase seed.
  const auto real = field::sample_zpf(config, 0);
  return stationary_moments(params, std::span<const field::FieldMode>(real.modes));
}

double narrow_line_x2(const OscillatorParams& params) {
  const double coupling = params.e / params.m;
  const double gamma = params.gamma();
  return coupling * coupling * (params.hbar * params.omega0 / (4.0 * kPi * kPi)) *
         (kPi / (2.0 * params.omega0 * params.omega0 * gamma));
}

Complex narrowband_coefficient(Complex chi_nk, double omega_kn, const OscillatorParams& params) {
  return params.e / (2.0 * kPi * params.m) * std::sqrt(params.hbar * std::abs(omega_kn) / 2.0) * chi_nk;
}

}  // namespace zpflab::response
