#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "zpflab/error.hpp"
#include "zpflab/response.hpp"

using namespace zpflab;
using namespace zpflab::response;
constexpr double kPi = std::numbers::pi;

namespace {

// Closed form for a single damped resonance: theta(t) e^{-gamma t/2} sin(W t) / W.
double damped_kernel(double w0, double g, double t) {
  if (t < 0.0) return 0.0;
  const double w = std::sqrt(w0 * w0 - g * g / 4.0);
  return std::exp(-g * t / 2.0) * std::sin(w * t) / w;
}

}  // namespace

TEST_CASE("chi examples") {
  const auto a = chi(ResponseSet::single(2.0, 0.01), 0.0);
  CHECK(a.real() == doctest::Approx(0.25));
  CHECK(a.imag() == 0.0);
  const auto b = chi(ResponseSet::single(1.0, 0.01), 1.0);
  CHECK(std::abs(b.real()) < 1e-12);
  CHECK(b.imag() == doctest::Approx(100.0));
}

TEST_CASE("dense scan gives a full width close to gamma") {
  const auto set = ResponseSet::single(1.0, 0.01);
  const double peak = std::norm(chi(set, 1.0));
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double w = 0.98 + 0.04 * i / 200000.0;
    if (std::norm(chi(set, w)) >= peak / 2.0) {
      if (lo == 0.0) lo = w;
      hi = w;
    }
  }
  CHECK(lo == doctest::Approx(0.995).epsilon(1e-4));
  CHECK(hi == doctest::Approx(1.005).epsilon(1e-4));
  CHECK(hi - lo == doctest::Approx(0.01).epsilon(0.01));
}

TEST_CASE("crossing symmetry and peak response") {
  const ResponseSet set({{0.8, 0.03}, {1.7, 0.05}});
  for (double w : {0.1, 0.8, 1.33, 4.0}) {
    const auto p = chi(set, w), m = chi(set, -w);
    CHECK(m.real() == doctest::Approx(p.real()).epsilon(1e-14));
    CHECK(m.imag() == doctest::Approx(-p.imag()).epsilon(1e-14));
  }
  const double wk = 1.0, g = 0.05, step = 1e-5;
  const auto one = ResponseSet::single(wk, g);
  double best = 0.0, arg = 0.0;
  for (double w = 0.9; w < 1.1; w += step) {
    if (std::abs(chi(one, w)) > best) best = std::abs(chi(one, w)), arg = w;
  }
  CHECK(std::abs(arg - std::sqrt(wk * wk - g * g / 2.0)) <= step);
  CHECK(std::abs(chi(one, wk)) == doctest::Approx(1.0 / (g * wk)).epsilon(1e-14));
}

TEST_CASE("response sets sort, reject duplicates and flag broad lines") {
  const ResponseSet set({{2.0, 0.01}, {1.0, 0.01}});
  CHECK(set.terms().front().omega_k == 1.0);
  CHECK_FALSE(set.broad());
  CHECK(ResponseSet::single(1.0, 0.2).broad());
  CHECK_THROWS_AS(ResponseSet({{1.0, 0.01}, {1.0, 0.02}}), ConfigError);
  CHECK_THROWS_AS(ResponseSet::single(-1.0, 0.01), ConfigError);
}

TEST_CASE("chi_time matches the damped closed form and is causal") {
  const double g = 0.02;
  const auto set = ResponseSet::single(1.0, g);
  const double dt = 2.0 * kPi / 64.0;
  const TimeGrid grid{-200 * dt, dt, 200 + static_cast<std::size_t>(800.0 / dt)};
  const auto r = chi_time(set, grid);
  double peak = 0.0, neg = 0.0, err = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.at(i);
    peak = std::max(peak, std::abs(r.values[i]));
    if (t < -dt / 2) neg = std::max(neg, std::abs(r.values[i]));
    // The t = 0 node sits on the jump of the derivative, not of the value, so it is compared too.
    err = std::max(err, std::abs(r.values[i] - damped_kernel(1.0, g, t)));
  }
  CHECK(neg < 1e-3 * peak);
  CHECK(r.imag_residue < 1e-6);
  CHECK(err < 1e-3 * peak);

  // Envelope fit over three decay times 2/gamma: local maxima of |chi| against t.
  std::vector<double> ts, ls;
  for (std::size_t i = 1; i + 1 < grid.n; ++i) {
    const double t = grid.at(i);
    if (t <= 0.0 || t > 3.0 * 2.0 / g) continue;
    const double a = std::abs(r.values[i]);
    if (a > std::abs(r.values[i - 1]) && a >= std::abs(r.values[i + 1])) {
      ts.push_back(t);
      ls.push_back(std::log(a));
    }
  }
  REQUIRE(ts.size() > 20);
  double mt = 0, ml = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) mt += ts[i], ml += ls[i];
  mt /= ts.size();
  ml /= ts.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) sxy += (ts[i] - mt) * (ls[i] - ml), sxx += (ts[i] - mt) * (ts[i] - mt);
  CHECK(-sxy / sxx == doctest::Approx(g / 2.0).epsilon(0.05));
}

TEST_CASE("chi_time preconditions") {
  const auto set = ResponseSet::single(1.0, 0.02);
  CHECK_THROWS_AS(chi_time(set, {0.0, 2.0 * kPi / 8.0, 1000}), ResolutionError);
  CHECK_THROWS_AS(chi_time(set, {0.0, 0.05, 100}), ResolutionError);
  CHECK_THROWS_AS(chi_time(set, {0.013, 0.05, 20000}), ResolutionError);
}

TEST_CASE("Kramers-Kronig reconstruction on [0.2, 5] with 2^16 points") {
  const auto scan = kk_scan(ResponseSet::single(1.0, 0.01), 0.2, 5.0, 1 << 16);
  CHECK(scan.relative_residual < 0.02);
  CHECK(scan.points.size() == (1u << 16));
}

TEST_CASE("Kramers-Kronig edge cases") {
  std::vector<double> w(4096), zero(4096, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.2 + 4.8 * i / 4095.0;
  for (double v : kk_reconstruct(w, zero)) CHECK(v == 0.0);

  const auto set = ResponseSet::single(1.0, 0.01);
  const std::size_t n = 1 << 16;
  std::vector<double> w0(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    w0[i] = 5.0 * i / (n - 1.0);
    im[i] = chi(set, w0[i]).imag();
  }
  const auto re = kk_reconstruct(w0, im);
  CHECK(re[0] == doctest::Approx(1.0).epsilon(0.02));

  std::vector<double> narrow(512), narrow_im(512);
  for (std::size_t i = 0; i < narrow.size(); ++i) {
    narrow[i] = 0.95 + 0.1 * i / 511.0;
    narrow_im[i] = chi(set, narrow[i]).imag();
  }
  CHECK_THROWS_AS(kk_reconstruct(narrow, narrow_im), DomainError);
}

TEST_CASE("Kramers-Kronig residual shrinks with density") {
  const auto set = ResponseSet::single(1.0, 0.01);
  const double coarse = kk_scan(set, 0.2, 5.0, 1 << 12).relative_residual;
  const double fine = kk_scan(set, 0.2, 5.0, 1 << 16).relative_residual;
  CHECK(fine < coarse);
}

TEST_CASE("quality factor") {
  OscillatorParams p;
  p.omega0 = 1.0;
  p.tau = 1e-16;
  CHECK(q_factor(p) == doctest::Approx(1e16));
  p.tau = 0.01;
  CHECK(q_factor(p) == doctest::Approx(100.0));
  for (double w0 : {0.3, 1.0, 7.0}) {
    p.omega0 = w0;
    CHECK(q_factor(p) * p.gamma() == doctest::Approx(w0).epsilon(1e-14));
  }
  p.tau = 0.0;
  CHECK(std::isinf(q_factor(p)));
  CHECK(OscillatorParams::from_q(50.0).gamma() == doctest::Approx(0.02));
}

TEST_CASE("stationary moments in the narrow-line limit") {
  const auto p = OscillatorParams::from_q(100.0);
  field::SpectrumConfig c;
  c.n_modes = 16384;
  const auto m = stationary_moments(p, c);
  CHECK(m.x2 == doctest::Approx(narrow_line_x2(p)).epsilon(0.05));
  CHECK(narrow_line_x2(p) == doctest::Approx(1.0 / (8.0 * kPi * 0.01)).epsilon(1e-12));
  CHECK(m.p2 / (p.m * p.m * p.omega0 * p.omega0 * m.x2) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("stationary moments edge cases") {
  const auto p = OscillatorParams::from_q(100.0);
  std::vector<field::FieldMode> silent{{0.9, 0.0, 0.1}, {1.0, 0.0, 0.2}};
  const auto z = stationary_moments(p, silent);
  CHECK(z.x2 == 0.0);
  CHECK(z.p2 == 0.0);
  field::SpectrumConfig coarse;
  coarse.n_modes = 256;
  CHECK_THROWS_AS(stationary_moments(p, coarse), ResolutionError);
}

TEST_CASE("narrowband coefficient") {
  OscillatorParams p;
  CHECK(std::abs(narrowband_coefficient({0.0, 0.0}, 2.0, p)) == 0.0);
  const auto one = narrowband_coefficient({2.0 * kPi, 0.0}, 2.0, p);
  CHECK(one.real() == doctest::Approx(1.0).epsilon(1e-14));
  const Complex c{0.3, -1.2};
  CHECK(std::abs(narrowband_coefficient(c, -3.0, p)) ==
        doctest::Approx(std::sqrt(2.0) * std::abs(narrowband_coefficient(c, 1.5, p))).epsilon(1e-14));
}

TEST_CASE("oscillator params validation") {
  CHECK_THROWS_AS(OscillatorParams({0.0, 1.0, 1.0, 0.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(OscillatorParams({1.0, 1.0, 1.0, -0.1, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(OscillatorParams({1.0, 1.0, 1.0, 0.0, 0.0}).validate(), ConfigError);
}
