#include "zpflab/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "zpflab/error.hpp"
#include "zpflab/rng.hpp"

namespace zpflab::quantum {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_paired(const ResponseExpansion& x, const ResponseExpansion& p) {
  if (x.entries.size() != p.entries.size()) throw PairingError("bracket: expansions have different entry counts");
  for (std::size_t j = 0; j < x.entries.size(); ++j) {
    if (x.entries[j].k != p.entries[j].k || x.entries[j].omega_kn != p.entries[j].omega_kn) {
      throw PairingError("bracket: expansions do not share the entry set {k, omega_kn}");
    }
  }
}

void require_square(const MatrixXcd& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw ShapeError(std::string(what) + ": matrix dimensions do not match");
}

}  // namespace

ExpansionPair response_expansions(const spectral::TransitionData& data, std::size_t n, std::size_t k_max,
                                  std::uint64_t seed) {
  if (n >= data.size()) throw ShapeError("response_expansions: state index out of range");
  k_max = std::min(k_max, data.size());
  ExpansionPair out;
  out.x.state = out.p.state = n;
  out.x.kind = ExpansionKind::position;
  out.p.kind = ExpansionKind::momentum;
  const auto r = static_cast<Eigen::Index>(n);
  for (std::size_t k = 0; k < k_max; ++k) {
    if (k == n) continue;
    const auto c = static_cast<Eigen::Index>(k);
    const double phase = counter_phase(seed, (static_cast<std::uint64_t>(n) << 32) | k);
    out.x.entries.push_back({k, data.omega(r, c), data.x(r, c), phase});
    out.p.entries.push_back({k, data.omega(r, c), data.p(r, c), phase});
  }
  return out;
}

ResponseExpansion momentum_from_position(const ResponseExpansion& x, double m) {
  ResponseExpansion p = x;
  p.kind = ExpansionKind::momentum;
  for (auto& e : p.entries) e.coeff = -kI * m * e.omega_kn * e.coeff;
  return p;
}

Complex evaluate_expansion_complex(const ResponseExpansion& exp, double t) {
  Complex sum{0.0, 0.0};
  for (const auto& e : exp.entries) {
    const Complex term = e.coeff * e.a() * std::polar(1.0, -e.omega_kn * t);
    sum += term + std::conj(term);
  }
  return sum;
}

double evaluate_expansion(const ResponseExpansion& exp, double t) {
  return evaluate_expansion_complex(exp, t).real();
}

NormalDerivatives normal_derivatives(const ExpansionEntry& entry, double t) {
  const Complex rot = std::polar(1.0, -entry.omega_kn * t);
  return {entry.coeff * rot, std::conj(entry.coeff) * std::conj(rot)};
}

Complex poissonian_bracket(const ResponseExpansion& x, const ResponseExpansion& p, double t) {
  require_paired(x, p);
  Complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < x.entries.size(); ++j) {
    const auto dx = normal_derivatives(x.entries[j], t);
    const auto dp = normal_derivatives(p.entries[j], t);
    sum += dx.d_a * dp.d_a_conj - dp.d_a * dx.d_a_conj;
  }
  return sum;
}

ModeAction zpf_mode_action(double hbar) {
  return [hbar](double) { return 0.5 * hbar; };
}

Complex bracket_via_canonical_complex(const ResponseExpansion& x, const ResponseExpansion& p, double t,
                                      const ModeAction& action) {
  require_paired(x, p);
  Complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < x.entries.size(); ++j) {
    const double w = std::abs(x.entries[j].omega_kn);
    const double act = action(x.entries[j].omega_kn);
    // a = (q sqrt(|w| / J) + i p / sqrt(J |w|)) / 2
    const Complex da_dq = 0.5 * std::sqrt(w / act);
    const Complex da_dp = 0.5 * kI / std::sqrt(act * w);
    const auto dx = normal_derivatives(x.entries[j], t);
    const auto dp = normal_derivatives(p.entries[j], t);
    const Complex x_q = dx.d_a * da_dq + dx.d_a_conj * std::conj(da_dq);
    const Complex x_p = dx.d_a * da_dp + dx.d_a_conj * std::conj(da_dp);
    const Complex p_q = dp.d_a * da_dq + dp.d_a_conj * std::conj(da_dq);
    const Complex p_p = dp.d_a * da_dp + dp.d_a_conj * std::conj(da_dp);
    sum += x_q * p_p - p_q * x_p;
  }
  return sum;
}

double bracket_via_canonical(const ResponseExpansion& x, const ResponseExpansion& p, double t, double hbar) {
  return bracket_via_canonical_complex(x, p, t, zpf_mode_action(hbar)).real();
}

CanonicalModePair to_canonical(Complex a, double omega, double hbar) {
  const double w = std::abs(omega);
  return {std::sqrt(hbar / (2.0 * w)) * 2.0 * a.real(), std::sqrt(hbar * w / 2.0) * 2.0 * a.imag(), omega, hbar};
}

Complex to_normal(const CanonicalModePair& pair) {
  const double w = std::abs(pair.omega);
  return 0.5 * Complex(pair.q * std::sqrt(2.0 * w / pair.hbar), pair.p * std::sqrt(2.0 / (pair.hbar * w)));
}

double trk_sum(const spectral::TransitionData& data, std::size_t n, std::size_t k_max) {
  if (n >= data.size() || k_max > data.size()) throw ShapeError("trk_sum: index out of range");
  const auto r = static_cast<Eigen::Index>(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < k_max; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    sum += data.omega(r, c) * std::norm(data.x(r, c));
  }
  return 2.0 * data.m * sum;
}

TrkResult trk_converged(const spectral::TransitionData& data, std::size_t n, double tol) {
  std::size_t k = std::min(n + 2, data.size());
  double value = trk_sum(data, n, k);
  while (true) {
    const std::size_t next = std::min(2 * k, data.size());
    if (next == k) return {value, k, false};
    const double v = trk_sum(data, n, next);
    const bool done = std::abs(v - value) < tol;
    value = v;
    k = next;
    if (done) return {value, k, true};
  }
}

std::size_t low_block_size(std::size_t n) { return std::min(n, n / 2 + 1); }

CommutatorReport commutator(const MatrixXcd& X, const MatrixXcd& P, double hbar) {
  if (X.rows() != X.cols()) throw ShapeError("commutator: X is not square");
  require_square(P, X.rows(), "commutator");
  CommutatorReport rep;
  rep.value = X * P - P * X;
  rep.trace = rep.value.trace();
  const auto n = X.rows();
  rep.low_block = low_block_size(static_cast<std::size_t>(n));
  const auto low = static_cast<Eigen::Index>(rep.low_block);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const Complex target = r == c ? Complex(0.0, hbar) : Complex(0.0, 0.0);
      const double dev = std::abs(rep.value(r, c) - target);
      if (r < low && c < low) {
        rep.low_block_deviation = std::max(rep.low_block_deviation, dev);
        if (r != c) rep.low_block_offdiag = std::max(rep.low_block_offdiag, dev);
      } else {
        rep.corner_deviation = std::max(rep.corner_deviation, dev);
      }
    }
  }
  return rep;
}

HeisenbergReport heisenberg_check(const MatrixXcd& X, const MatrixXcd& P, const MatrixXcd& H,
                                  const MatrixXcd& F, double m, double hbar) {
  const auto n = X.rows();
  require_square(X, n, "heisenberg_check");
  require_square(P, n, "heisenberg_check");
  require_square(H, n, "heisenberg_check");
  require_square(F, n, "heisenberg_check");
  const Complex inv = 1.0 / Complex(0.0, hbar);
  const MatrixXcd r1 = inv * (X * H - H * X) - P / m;
  const MatrixXcd r2 = inv * (P * H - H * P) - F;
  HeisenbergReport rep;
  rep.low_block = low_block_size(static_cast<std::size_t>(n));
  const auto low = static_cast<Eigen::Index>(rep.low_block);
  rep.r1_max = r1.cwiseAbs().maxCoeff();
  rep.r2_max = r2.topLeftCorner(low, low).cwiseAbs().maxCoeff();
  return rep;
}

BohrReport bohr_check(const spectral::TransitionData& data) {
  BohrReport rep;
  const auto n = static_cast<Eigen::Index>(data.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double res = std::abs(data.hbar * data.omega(r, c) - (data.energies(c) - data.energies(r)));
      rep.construction_residual = std::max(rep.construction_residual, res);
    }
  }
  for (Eigen::Index r = 0; r + 1 < n; ++r) rep.spacings.push_back(data.omega(r, r + 1));
  rep.spacings_increasing = !rep.spacings.empty();
  for (std::size_t i = 0; i < rep.spacings.size(); ++i) {
    rep.spacing_spread = std::max(rep.spacing_spread, std::abs(rep.spacings[i] - rep.spacings[0]));
    if (i > 0 && !(rep.spacings[i] > rep.spacings[i - 1])) rep.spacings_increasing = false;
  }
  return rep;
}

}  // namespace zpflab::quantum
