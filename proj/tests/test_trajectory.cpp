#include <cmath>
#include <numbers>

#include "doctest.h"
#include "zpflab/error.hpp"
#include "zpflab/potential.hpp"
#include "zpflab/response.hpp"
#include "zpflab/trajectory.hpp"

using namespace zpflab;
using namespace zpflab::sim;
constexpr double kPi = std::numbers::pi;

namespace {

response::OscillatorParams undamped() { return {}; }

double max_cos_error(double dt, double periods) {
  SimConfig c;
  c.dt = dt;
  c.t_total = periods * 2.0 * kPi;
  c.x0 = 1.0;
  double err = 0.0;
  integrate_visit(undamped(), Potential::harmonic(1.0), {}, c,
                  [&](double t, double x, double) { err = std::max(err, std::abs(x - std::cos(t))); });
  return err;
}

double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) mt += t[i], my += y[i];
  mt /= t.size();
  my /= t.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) sxy += (t[i] - mt) * (y[i] - my), sxx += (t[i] - mt) * (t[i] - mt);
  return sxy / sxx;
}

}  // namespace

TEST_CASE("potentials") {
  const auto h = Potential::harmonic(2.0, 3.0);
  CHECK(h.value(0.5) == doctest::Approx(0.5 * 3.0 * 4.0 * 0.25));
  CHECK(h.force(0.5) == doctest::Approx(-3.0 * 4.0 * 0.5));
  CHECK(h.force_derivative(0.5) == doctest::Approx(-12.0));
  const auto q = Potential::polynomial({0.0, 0.0, 0.25});
  for (double x : {-1.3, 0.2, 2.0}) {
    CHECK(q.value(x) == doctest::Approx(std::pow(x, 4) / 4.0));
    CHECK(q.force(x) == doctest::Approx(-x * x * x));
    CHECK(q.force_derivative(x) == doctest::Approx(-3.0 * x * x));
  }
  CHECK(Potential::polynomial({0.5, 0.1, 0.2, 0.0, 0.0}).coefficients().size() == 3);
  CHECK_THROWS_AS(Potential::polynomial({0.5, 0.2}), ConfigError);
  CHECK_THROWS_AS(Potential::polynomial({0.5, 0.0, -1.0}), ConfigError);
  CHECK_THROWS_AS(Potential::polynomial({}), ConfigError);
  CHECK_THROWS_AS(Potential::harmonic(-1.0), ConfigError);
}

TEST_CASE("undriven oscillator follows cos t over 100 periods") {
  CHECK(max_cos_error(1e-3, 100.0) < 1e-6);
}

TEST_CASE("fourth-order convergence") {
  const double coarse = max_cos_error(0.04, 10.0), fine = max_cos_error(0.02, 10.0);
  CHECK(coarse / fine == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("radiation reaction decays the energy at gamma") {
  auto p = undamped();
  p.tau = 0.01;
  SimConfig c;
  c.dt = 0.01;
  c.t_total = 3.0 / p.gamma();
  c.x0 = 1.0;
  const auto pot = Potential::harmonic(1.0);
  std::vector<double> t, le;
  integrate_visit(p, pot, {}, c, [&](double ti, double x, double v) {
    t.push_back(ti);
    le.push_back(std::log(0.5 * v * v + pot.value(x)));
  });
  CHECK(-fit_slope(t, le) == doctest::Approx(p.gamma()).epsilon(0.05));
}

TEST_CASE("forced oscillator reaches the closed-form amplitude") {
  const double wd = 0.5, amp = 0.1;
  field::FieldRealization f;
  f.modes = {{wd, amp, 0.3}};
  SimConfig c;
  c.dt = 0.01;
  c.t_total = 400.0 * 2.0 * kPi / wd;
  double sc = 0.0, ss = 0.0;
  std::size_t n = 0;
  integrate_visit(undamped(), Potential::harmonic(1.0), f, c, [&](double t, double x, double) {
    sc += x * std::cos(wd * t);
    ss += x * std::sin(wd * t);
    ++n;
  });
  // Lock-in projection onto the drive removes the free oscillation at omega0.
  const double measured = 2.0 * std::hypot(sc, ss) / static_cast<double>(n);
  CHECK(measured == doctest::Approx(amp / std::abs(1.0 - wd * wd)).epsilon(0.01));
}

TEST_CASE("response is linear in the field") {
  auto p = response::OscillatorParams::from_q(50.0);
  field::SpectrumConfig s;
  s.n_modes = 128;
  auto f = field::sample_zpf(s, 3);
  auto g = f;
  for (auto& m : g.modes) m.amplitude *= 2.0;
  SimConfig c;
  c.t_total = 300.0;
  const auto a = integrate(p, Potential::harmonic(1.0), f, c);
  const auto b = integrate(p, Potential::harmonic(1.0), g, c);
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(a.x[i]));
    err = std::max(err, std::abs(b.x[i] - 2.0 * a.x[i]));
  }
  CHECK(err < 1e-12 * scale);
}

TEST_CASE("trajectories are deterministic and trimmed by the burn-in") {
  auto p = response::OscillatorParams::from_q(50.0);
  field::SpectrumConfig s;
  s.n_modes = 64;
  const auto f = field::sample_zpf(s, 11);
  SimConfig c;
  c.t_total = 100.0;
  c.t_burn = 40.0;
  const auto a = integrate(p, Potential::harmonic(1.0), f, c), b = integrate(p, Potential::harmonic(1.0), f, c);
  CHECK(a.x == b.x);
  CHECK(a.p == b.p);
  CHECK(a.t.front() == doctest::Approx(40.0));
  CHECK(a.t.back() == doctest::Approx(100.0));
  CHECK(a.size() == 1201);
}

TEST_CASE("integrate error contracts") {
  field::SpectrumConfig s;
  const auto f = field::sample_zpf(s, 1);
  SimConfig c;
  c.dt = 0.1;
  CHECK_THROWS_AS(integrate(undamped(), Potential::harmonic(1.0), f, c), ResolutionError);
  SimConfig stiff;
  stiff.dt = 0.05;
  stiff.t_total = 10.0;
  stiff.x0 = 100.0;
  CHECK_THROWS_AS(integrate(undamped(), Potential::polynomial({0.0, 0.0, 0.25}), {}, stiff), DivergenceError);
  SimConfig bad;
  bad.t_burn = 2000.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("ensemble moments match the stationary oracle") {
  const auto p = response::OscillatorParams::from_q(20.0);
  field::SpectrumConfig s;
  s.n_modes = 2048;
  SimConfig c;
  c.t_burn = 5.0 / p.gamma();
  c.t_total = c.t_burn + 500.0;
  c.n_trajectories = 48;
  c.seed = 99;
  const auto r = ensemble_moments(p, Potential::harmonic(1.0), c, s);
  const auto oracle = response::stationary_moments(p, s);
  CHECK(std::abs(r.mean_x2 - oracle.x2) < 3.0 * r.stderr_x2);
  CHECK(std::abs(r.mean_x) < 3.0 * r.stderr_x);
  CHECK(std::abs(r.first_half_x2 - r.second_half_x2) <
        3.0 * std::hypot(r.first_half_stderr, r.second_half_stderr));
  CHECK(r.n_trajectories == 48);

  // Mode amplitudes go as sqrt(hbar): a four-fold hbar doubles every amplitude.
  auto s4 = s;
  s4.hbar = 4.0;
  const auto r4 = ensemble_moments(p, Potential::harmonic(1.0), c, s4);
  CHECK(r4.mean_x2 == doctest::Approx(4.0 * r.mean_x2).epsilon(1e-9));

  const auto again = ensemble_moments(p, Potential::harmonic(1.0), c, s);
  CHECK(again.mean_x2 == r.mean_x2);
  CHECK(again.config_hash == r.config_hash);
  c.seed = 100;
  CHECK(config_hash(p, Potential::harmonic(1.0), c, s) != r.config_hash);
}

TEST_CASE("ensemble preconditions") {
  const auto p = response::OscillatorParams::from_q(20.0);
  SimConfig c;
  c.n_trajectories = 1;
  c.t_burn = 200.0;
  CHECK_THROWS_AS(ensemble_moments(p, Potential::harmonic(1.0), c, {}), ConfigError);
  c.n_trajectories = 4;
  c.t_burn = 10.0;
  CHECK_THROWS_AS(ensemble_moments(p, Potential::harmonic(1.0), c, {}), ConfigError);
}

TEST_CASE("moment report json") {
  MomentReport r;
  r.n_trajectories = 3;
  r.mean_x2 = 1.5;
  const auto j = to_json(r);
  for (const char* key : {"mean_x", "var_x", "var_p", "stderr_x2", "stderr_p2", "n_trajectories", "config_hash"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["var_x"].get<double>() == 1.5);
}

TEST_CASE("single-mode drive gives a single spectral line") {
  const double wd = 1.3;
  field::FieldRealization f;
  f.modes = {{wd, 0.2, 0.0}};
  SimConfig c;
  c.t_total = 2000.0;
  c.dt = 0.02;
  const auto traj = integrate(undamped(), Potential::harmonic(2.0), {f.modes, {}, 0}, c);
  PsdOptions o;
  o.segment = 1 << 15;
  o.reference_omega = wd;
  const auto s = psd(traj, o);
  const auto line = analyze_line(s);
  // Free oscillation at omega0 = 2 is also present; the drive line dominates below it.
  std::vector<PsdPoint> low(s.begin(), s.begin() + static_cast<long>(1.65 / line.bin_width));
  CHECK(std::abs(analyze_line(low).peak_omega - wd) <= line.bin_width);
}

TEST_CASE("psd normalization and preconditions") {
  std::vector<double> x(1 << 14);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.7 * std::cos(1.0 * 0.05 * i + 0.2);
  PsdOptions o;
  o.segment = 1 << 12;
  const auto s = psd(x, 0.05, o);
  double total = 0.0;
  for (const auto& pt : s) total += pt.power * (s[1].omega - s[0].omega);
  CHECK(total == doctest::Approx(0.7 * 0.7 / 2.0).epsilon(0.02));
  o.segment = 512;
  CHECK_THROWS_AS(psd(x, 0.05, o), ResolutionError);
}
