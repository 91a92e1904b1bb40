#include <cmath>
#include <numbers>

#include "doctest.h"
#include "zpflab/error.hpp"
#include "zpflab/quantum.hpp"
#include "zpflab/spectral.hpp"

using namespace zpflab;
using namespace zpflab::quantum;
using Eigen::Index;

namespace {

constexpr Complex kI{0.0, 1.0};

const spectral::StationaryStateSet& harmonic60() {
  static const auto s = spectral::solve_states(sim::Potential::harmonic(1.0), {-16.0, 16.0, 1024}, 60);
  return s;
}

const spectral::StationaryStateSet& quartic64() {
  static const auto s = spectral::solve_states(sim::Potential::polynomial({0.0, 0.0, 0.25}), {-9.0, 9.0, 1024}, 64);
  return s;
}

const spectral::TransitionData& harmonic_data() {
  static const auto d = spectral::transition_data(harmonic60());
  return d;
}

const spectral::TransitionData& quartic_data() {
  static const auto d = spectral::transition_data(quartic64());
  return d;
}

// Harmonic ground state: one entry x_01 = sqrt(hbar / 2 m omega0) at omega_10 = omega0.
ExpansionPair ground_fixture(double omega0, double phase = 0.4) {
  ResponseExpansion x;
  x.entries.push_back({1, omega0, Complex(std::sqrt(0.5 / omega0), 0.0), phase});
  return {x, momentum_from_position(x, 1.0)};
}

// Finite-difference bracket: perturb each a along the unit circle (a = e^{i phi}) and
// radially (a = r e^{i phi}), then recover Wirtinger derivatives from the polar chain rule.
Complex finite_difference_bracket(const ResponseExpansion& x, const ResponseExpansion& p, double t) {
  const double h = 1e-6;
  Complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < x.entries.size(); ++j) {
    auto eval = [&](const ResponseExpansion& e, double dr, double dphi) {
      auto copy = e;
      auto& en = copy.entries[j];
      en.coeff *= 1.0 + dr;
      en.phase += dphi;
      return evaluate_expansion(copy, t);
    };
    auto derivs = [&](const ResponseExpansion& e) {
      const double f_r = (eval(e, h, 0.0) - eval(e, -h, 0.0)) / (2 * h);
      const double f_phi = (eval(e, 0.0, h) - eval(e, 0.0, -h)) / (2 * h);
      const Complex a = e.entries[j].a();
      // d/da = (e^{-i phi}/2)(d/dr - (i/r) d/dphi) at r = 1; d/da* is its conjugate for real f.
      const Complex d_a = 0.5 * std::conj(a) * (f_r - kI * f_phi);
      return std::pair{d_a, std::conj(d_a)};
    };
    const auto [xa, xac] = derivs(x);
    const auto [pa, pac] = derivs(p);
    sum += xa * pac - pa * xac;
  }
  return sum;
}

}  // namespace

TEST_CASE("expansion evaluation") {
  ResponseExpansion e;
  e.entries.push_back({1, 1.0, {0.5, 0.0}, 0.0});
  CHECK(evaluate_expansion(e, 0.0) == doctest::Approx(1.0));
  CHECK(evaluate_expansion(e, std::numbers::pi) == doctest::Approx(-1.0));
  const auto pair = response_expansions(harmonic_data(), 4, 30, 123);
  for (double t : {0.0, 0.3, 11.0}) CHECK(std::abs(evaluate_expansion_complex(pair.x, t).imag()) <= 1e-14);
  for (const auto& en : pair.x.entries) CHECK(std::abs(std::abs(en.a()) - 1.0) < 1e-15);
  for (std::size_t j = 0; j < pair.x.entries.size(); ++j) {
    const auto& xe = pair.x.entries[j];
    CHECK(pair.p.entries[j].coeff == Complex(0.0, -harmonic_data().m * xe.omega_kn) * xe.coeff);
    CHECK(xe.k != 4);
  }
}

TEST_CASE("harmonic ground state bracket equals i hbar") {
  const auto f = ground_fixture(1.0);
  const auto b = poissonian_bracket(f.x, f.p, 0.0);
  CHECK(std::abs(b - kI) < 1e-15);
  CHECK(std::abs(poissonian_bracket({}, {}, 1.0)) == 0.0);
  for (double t : {0.7, 3.1, 12.9}) CHECK(std::abs(poissonian_bracket(f.x, f.p, t) - b) < 1e-12);
}

TEST_CASE("analytic derivatives agree with finite differences") {
  const auto pair = response_expansions(quartic_data(), 2, 12, 5);
  for (double t : {0.0, 1.7}) {
    const auto fd = finite_difference_bracket(pair.x, pair.p, t);
    CHECK(std::abs(fd - poissonian_bracket(pair.x, pair.p, t)) < 1e-6);
    const auto& en = pair.x.entries[3];
    const auto d = normal_derivatives(en, t);
    CHECK(std::abs(d.d_a - en.coeff * std::exp(-kI * en.omega_kn * t)) < 1e-15);
    CHECK(std::abs(d.d_a_conj - std::conj(d.d_a)) < 1e-15);
  }
}

TEST_CASE("canonical bracket equals (-i/hbar) times the normal bracket") {
  const auto f = ground_fixture(1.0);
  CHECK(bracket_via_canonical(f.x, f.p, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto* d : {&harmonic_data(), &quartic_data()}) {
    for (std::size_t n : {0u, 3u, 7u}) {
      const auto pair = response_expansions(*d, n, 40, 99 + n);
      for (double t : {0.0, 2.2, 40.0}) {
        const auto canon = bracket_via_canonical_complex(pair.x, pair.p, t, zpf_mode_action(1.0));
        CHECK(std::abs(canon - (-kI) * poissonian_bracket(pair.x, pair.p, t)) < 1e-12);
        CHECK(std::abs(canon.imag()) < 1e-12);
      }
    }
  }
}

TEST_CASE("bracket is bilinear in the coefficients") {
  auto pair = response_expansions(quartic_data(), 1, 20, 8);
  const double base = bracket_via_canonical(pair.x, pair.p, 0.5, 1.0);
  for (auto* e : {&pair.x, &pair.p}) {
    for (auto& en : e->entries) en.coeff *= 3.0;
  }
  CHECK(bracket_via_canonical(pair.x, pair.p, 0.5, 1.0) == doctest::Approx(9.0 * base).epsilon(1e-13));
}

TEST_CASE("bracket equals i times the TRK sum and propagates perturbations") {
  const auto& d = quartic_data();
  for (std::size_t n : {0u, 2u, 5u}) {
    const auto pair = response_expansions(d, n, 48, 17);
    const double trk = trk_sum(d, n, 48);
    CHECK(std::abs(poissonian_bracket(pair.x, pair.p, 0.0) - kI * trk) < 1e-13);
  }
  // Scaling one coefficient breaks the sum rule; the bracket follows i * trk exactly.
  auto pert = response_expansions(d, 0, 48, 17);
  pert.x.entries[0].coeff *= 1.001;
  pert.p = momentum_from_position(pert.x, d.m);
  double trk = 0.0;
  for (const auto& en : pert.x.entries) trk += 2.0 * d.m * en.omega_kn * std::norm(en.coeff);
  const auto b = poissonian_bracket(pert.x, pert.p, 0.0);
  CHECK(std::abs(b - kI * trk) < 1e-13);
  CHECK(std::abs(b - kI) > 1e-4);
}

TEST_CASE("bracket is invariant under phase re-draws and time") {
  const auto& d = harmonic_data();
  const auto ref = poissonian_bracket(response_expansions(d, 5, 30, 0).x, response_expansions(d, 5, 30, 0).p, 0.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pair = response_expansions(d, 5, 30, seed);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(poissonian_bracket(pair.x, pair.p, 0.37 * i * i) - ref) < 1e-12);
  }
}

TEST_CASE("pairing errors") {
  auto pair = response_expansions(harmonic_data(), 0, 10, 1);
  pair.p.entries.pop_back();
  CHECK_THROWS_AS(poissonian_bracket(pair.x, pair.p, 0.0), PairingError);
  pair = response_expansions(harmonic_data(), 0, 10, 1);
  pair.p.entries[2].omega_kn += 1e-3;
  CHECK_THROWS_AS(bracket_via_canonical(pair.x, pair.p, 0.0, 1.0), PairingError);
}

TEST_CASE("a flat field spectrum makes the normalized bracket depend on omega") {
  for (double w0 : {0.5, 1.0, 2.0}) {
    const auto f = ground_fixture(w0);
    CHECK(bracket_via_canonical(f.x, f.p, 0.3, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // Equal energy hbar/2 in every mode instead of hbar |omega| / 2.
    const ModeAction flat = [](double w) { return 0.5 / std::abs(w); };
    CHECK(bracket_via_canonical_complex(f.x, f.p, 0.3, flat).real() == doctest::Approx(w0).epsilon(1e-12));
  }
}

TEST_CASE("canonical variables: round trip and classical anchor") {
  for (double phi : {0.0, 1.0, 4.0}) {
    const Complex a = std::polar(1.0, phi);
    const auto c = to_canonical(a, 2.5, 1.0);
    CHECK(std::abs(to_normal(c) - a) < 1e-15);
    CHECK(c.q == doctest::Approx(std::sqrt(1.0 / 5.0) * 2.0 * std::cos(phi)));
  }
  // {q, p}_qp = 1: expand q and p of one mode as functions of a and take the bracket.
  const double w = 1.3;
  ResponseExpansion q, p;
  q.entries.push_back({1, w, Complex(std::sqrt(1.0 / (2.0 * w)), 0.0), 0.8});
  p.entries.push_back({1, w, Complex(0.0, -std::sqrt(w / 2.0)), 0.8});
  CHECK(bracket_via_canonical(q, p, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("TRK sum rule") {
  const auto& h = harmonic_data();
  CHECK(std::abs(trk_sum(h, 0, 2) - 1.0) < 1e-6);
  CHECK(std::abs(trk_sum(h, 3, 5) - 1.0) < 1e-6);
  for (std::size_t n = 0; n <= 8; ++n) {
    const auto r = trk_converged(h, n);
    CHECK(std::abs(r.value - 1.0) < 1e-6);
    CHECK(r.converged);
  }
  CHECK(std::abs(trk_sum(quartic_data(), 0, 40) - 1.0) < 1e-4);
  CHECK_THROWS_AS(trk_sum(h, 61, 2), ShapeError);
}

TEST_CASE("commutator of truncated harmonic matrices") {
  const auto m = spectral::matrices(harmonic_data(), 60);
  const auto r = commutator(m.X, m.P, 1.0);
  CHECK(r.low_block == 31);
  CHECK(r.low_block_deviation < 1e-6);
  CHECK(r.low_block_offdiag < 1e-6);
  CHECK(std::abs(r.trace) < 1e-10);
  CHECK(r.corner_deviation > 1.0);
  CHECK(std::abs(r.value(59, 59) - Complex(0.0, -59.0)) < 1e-4);
  CHECK_THROWS_AS(commutator(m.X, m.P.topLeftCorner(10, 10), 1.0), ShapeError);
}

TEST_CASE("Heisenberg equations") {
  const auto mh = spectral::matrices(harmonic_data(), 60);
  const auto fh = spectral::force_matrix(harmonic60(), sim::Potential::harmonic(1.0), 60);
  CHECK((fh + mh.X).cwiseAbs().maxCoeff() < 1e-9);
  const auto rh = heisenberg_check(mh.X, mh.P, mh.H, fh, 1.0, 1.0);
  CHECK(rh.r1_max < 1e-12);
  CHECK(rh.r2_max < 1e-6);

  const auto pot = sim::Potential::polynomial({0.0, 0.0, 0.25});
  const auto mq = spectral::matrices(quartic_data(), 60);
  const auto rq = heisenberg_check(mq.X, mq.P, mq.H, spectral::force_matrix(quartic64(), pot, 60), 1.0, 1.0);
  CHECK(rq.r1_max < 1e-12);
  CHECK(rq.r2_max < 1e-4);
}

TEST_CASE("Bohr structure") {
  const auto& h = harmonic_data();
  CHECK(h.hbar * h.omega(0, 1) == h.energies(1) - h.energies(0));
  CHECK(std::abs(h.omega(0, 1) - 1.0) < 1e-4);
  const auto hb = bohr_check(h);
  CHECK(hb.construction_residual < 1e-12);
  for (std::size_t n = 0; n <= 8; ++n) CHECK(std::abs(hb.spacings[n] - 1.0) < 1e-4);
  auto q = quartic_data();
  const auto qb = bohr_check(q);
  CHECK(qb.spacings_increasing);
  for (std::size_t n = 1; n < 20; ++n) CHECK(qb.spacings[n] > qb.spacings[n - 1]);
}
