#pragma once

// Stationary states of a 1D binding potential and the transition data
// {E_n, omega_kn, x_nk, p_nk} built from them.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "zpflab/potential.hpp"

namespace zpflab::spectral {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Discretization {
  // Sine-basis DVR of the hard-wall interval: spectrally accurate.
  sine_dvr,
  // Second-order central differences.
  central_difference,
};

std::string to_string(Discretization d);
Discretization discretization_from_string(const std::string& name);

// Hard walls at x_min and x_max; n_points interior nodes
// x_i = x_min + (i + 1) h, h = (x_max - x_min) / (n_points + 1).
struct GridSpec {
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t n_points = 1024;

  double spacing() const { return (x_max - x_min) / static_cast<double>(n_points + 1); }
  double node(std::size_t i) const { return x_min + static_cast<double>(i + 1) * spacing(); }
  void validate() const;
};

struct Units {
  double hbar = 1.0;
  double m = 1.0;
};

struct StationaryStateSet {
  GridSpec grid;
  Units units;
  VectorXd energies;
  // Column n holds psi_n at the grid nodes, normalized so that
  // sum_i psi_n(x_i) psi_k(x_i) h = delta_nk.
  MatrixXd wavefunctions;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
  double energy(std::size_t n) const { return energies(static_cast<Eigen::Index>(n)); }
};

// Lowest n_states eigenpairs of -(hbar^2 / 2m) d^2/dx^2 + V(x). Each psi_n is
// signed so that its first node with |psi| > 1e-8 max |psi| is positive.
// Throws ConfigError if n_states > n_points / 4, DomainError if any returned
// state has boundary amplitude above 1e-6 of its maximum.
StationaryStateSet solve_states(const sim::Potential& pot, const GridSpec& grid, std::size_t n_states,
                                const Units& units = {},
                                Discretization method = Discretization::sine_dvr);

// Entry (n, k) of each matrix: omega(n, k) = omega_kn = (E_k - E_n) / hbar,
// x(n, k) = x_nk, p(n, k) = p_nk = -i m omega_kn x_nk.
struct TransitionData {
  double hbar = 1.0;
  double m = 1.0;
  VectorXd energies;
  MatrixXd omega;
  MatrixXcd x;
  MatrixXcd p;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
  double energy(std::size_t n) const { return energies(static_cast<Eigen::Index>(n)); }
};

TransitionData transition_data(const StationaryStateSet& states);

// max |<psi_n|psi_m> - delta_nm| under the grid inner product.
double orthonormality_error(const StationaryStateSet& states);

// The first n states of data.
TransitionData truncate(const TransitionData& data, std::size_t n);

struct OperatorMatrices {
  MatrixXcd X, P, H;
};

// Leading n_trunc x n_trunc block; H = diag(E_n).
OperatorMatrices matrices(const TransitionData& data, std::size_t n_trunc);

// F_nk = <psi_n| f(x) |psi_k> with f = -V'.
MatrixXcd force_matrix(const StationaryStateSet& states, const sim::Potential& pot, std::size_t n_trunc);

// Closed-form harmonic-oscillator reference values.
double harmonic_energy(std::size_t n, double omega0, const Units& units = {});
// x_{n,k}: sqrt((max(n,k)) hbar / (2 m omega0)) when |n - k| = 1, else 0.
double harmonic_position_element(std::size_t n, std::size_t k, double omega0, const Units& units = {});

// {hbar, m, energies[], omega[][], x_re[][], x_im[][], p_re[][], p_im[][]}, rows indexed by n.
nlohmann::json to_json(const TransitionData& data);
TransitionData transition_data_from_json(const nlohmann::json& doc);

}  // namespace zpflab::spectral
