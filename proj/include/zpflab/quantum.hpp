#pragma once

// Response expansions x_n(t) = sum_k x_nk a_nk e^{-i omega_kn t} + c.c., the
// bracket of x_n and p_n with respect to the field normal variables a_nk and
// with respect to the canonical field variables (q_nk, p_nk), and the matrix
// relations built on the same coefficients: sum rule, commutator, equations of
// motion and transition frequencies.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "zpflab/spectral.hpp"

namespace zpflab::quantum {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;

enum class ExpansionKind { position, momentum };

struct ExpansionEntry {
  std::size_t k = 0;
  double omega_kn = 0.0;
  Complex coeff;
  // a_nk = exp(i phase)
  double phase = 0.0;

  Complex a() const { return std::polar(1.0, phase); }
};

struct ResponseExpansion {
  std::size_t state = 0;
  ExpansionKind kind = ExpansionKind::position;
  std::vector<ExpansionEntry> entries;
};

struct ExpansionPair {
  ResponseExpansion x;
  ResponseExpansion p;
};

// Entries k != n with k < k_max; phases phi_nk drawn from a counter stream
// keyed on (seed, n, k). The momentum expansion carries p_nk = -i m omega_kn x_nk.
ExpansionPair response_expansions(const spectral::TransitionData& data, std::size_t n, std::size_t k_max,
                                  std::uint64_t seed);

// Copy of x with coefficients -i m omega_kn x_nk.
ResponseExpansion momentum_from_position(const ResponseExpansion& x, double m);

// Sum of each term and its conjugate, kept complex so the cancellation can be inspected.
Complex evaluate_expansion_complex(const ResponseExpansion& exp, double t);
double evaluate_expansion(const ResponseExpansion& exp, double t);

// d/da_nk and d/da_nk* of one expansion term at time t.
struct NormalDerivatives {
  Complex d_a;
  Complex d_a_conj;
};
NormalDerivatives normal_derivatives(const ExpansionEntry& entry, double t);

// sum_k (dx/da dp/da* - dp/da dx/da*). Throws PairingError unless both
// expansions list the same (k, omega_kn) in the same order.
Complex poissonian_bracket(const ResponseExpansion& x, const ResponseExpansion& p, double t);

// Action per field mode, J(omega) = mode energy / |omega|; the zero-point field has J = hbar / 2.
using ModeAction = std::function<double(double omega)>;
ModeAction zpf_mode_action(double hbar);

// Poisson bracket with respect to the canonical field variables
//   q = sqrt(J / |omega|) (a + a*),  p = -i sqrt(J |omega|) (a - a*),
// with derivatives carried through the chain rule from the normal-variable ones.
Complex bracket_via_canonical_complex(const ResponseExpansion& x, const ResponseExpansion& p, double t,
                                      const ModeAction& action);
double bracket_via_canonical(const ResponseExpansion& x, const ResponseExpansion& p, double t, double hbar);

struct CanonicalModePair {
  double q = 0.0;
  double p = 0.0;
  double omega = 1.0;
  double hbar = 1.0;
};

CanonicalModePair to_canonical(Complex a, double omega, double hbar);
Complex to_normal(const CanonicalModePair& pair);

// 2 m sum_{k < k_max} omega_kn |x_nk|^2
double trk_sum(const spectral::TransitionData& data, std::size_t n, std::size_t k_max);

struct TrkResult {
  double value;
  std::size_t k_max;
  bool converged;
};

// Starts at k_max = n + 2 and doubles until the sum changes by less than tol.
// converged is false if the available states run out first.
TrkResult trk_converged(const spectral::TransitionData& data, std::size_t n, double tol = 1e-6);

// Low block: indices 0 .. N/2 inclusive.
std::size_t low_block_size(std::size_t n);

struct CommutatorReport {
  MatrixXcd value;
  std::size_t low_block = 0;
  // max |(XP - PX)_nn' - i hbar delta_nn'| inside and outside the low block.
  double low_block_deviation = 0.0;
  double low_block_offdiag = 0.0;
  double corner_deviation = 0.0;
  Complex trace;
};

// Throws ShapeError for non-square or mismatched inputs.
CommutatorReport commutator(const MatrixXcd& X, const MatrixXcd& P, double hbar);

struct HeisenbergReport {
  // R1 = (1/i hbar)[X, H] - P/m over the whole matrix.
  double r1_max = 0.0;
  // R2 = (1/i hbar)[P, H] - F over the low block.
  double r2_max = 0.0;
  std::size_t low_block = 0;
};

HeisenbergReport heisenberg_check(const MatrixXcd& X, const MatrixXcd& P, const MatrixXcd& H,
                                  const MatrixXcd& F, double m, double hbar);

struct BohrReport {
  // max |hbar omega_kn - (E_k - E_n)|
  double construction_residual = 0.0;
  // omega_{n+1,n}
  std::vector<double> spacings;
  // max |omega_{n+1,n} - omega_{1,0}|
  double spacing_spread = 0.0;
  bool spacings_increasing = false;
};

BohrReport bohr_check(const spectral::TransitionData& data);

}  // namespace zpflab::quantum
