#include "zpflab/spectral.hpp"

#include <cmath>
#include <numbers>

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "zpflab/error.hpp"

namespace zpflab::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXd kinetic_sine_dvr(const GridSpec& grid, const Units& units) {
  const auto n = static_cast<Eigen::Index>(grid.n_points);
  const double big_n = static_cast<double>(grid.n_points + 1);
  const double len = grid.x_max - grid.x_min;
  const double pref = units.hbar * units.hbar / (2.0 * units.m) * kPi * kPi / (2.0 * len * len);
  MatrixXd t(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double i = static_cast<double>(a + 1);
    const double si = std::sin(kPi * i / big_n);
    t(a, a) = pref * ((2.0 * big_n * big_n + 1.0) / 3.0 - 1.0 / (si * si));
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double j = static_cast<double>(b + 1);
      const double sm = std::sin(kPi * (i - j) / (2.0 * big_n));
      const double sp = std::sin(kPi * (i + j) / (2.0 * big_n));
      const double sign = ((b - a) % 2 == 0) ? 1.0 : -1.0;
      t(a, b) = t(b, a) = pref * sign * (1.0 / (sm * sm) - 1.0 / (sp * sp));
    }
  }
  return t;
}

MatrixXd kinetic_central_difference(const GridSpec& grid, const Units& units) {
  const auto n = static_cast<Eigen::Index>(grid.n_points);
  const double h = grid.spacing();
  const double c = units.hbar * units.hbar / (2.0 * units.m * h * h);
  MatrixXd t = MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    t(a, a) = 2.0 * c;
    if (a + 1 < n) t(a, a + 1) = t(a + 1, a) = -c;
  }
  return t;
}

// Mirrors the upper triangle so the result is exactly symmetric.
MatrixXd grid_matrix_element(const MatrixXd& psi, const VectorXd& weight, Eigen::Index n) {
  const MatrixXd left = psi.leftCols(n);
  MatrixXd out = left.transpose() * (weight.asDiagonal() * left);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < r; ++c) out(r, c) = out(c, r);
  }
  return out;
}

MatrixXd matrix_from_json(const nlohmann::json& rows, Eigen::Index n, const char* name) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
    throw ConfigError(std::string("transition data: '") + name + "' has wrong shape");
  }
  MatrixXd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw ConfigError(std::string("transition data: '") + name + "' has wrong shape");
    }
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return out;
}

nlohmann::json matrix_to_json(const MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Number of eigenvalues of the tridiagonal (d, e) below x, by Sturm sequence.
Eigen::Index sturm_count(const VectorXd& d, const VectorXd& e, double x) {
  const double tiny = std::numeric_limits<double>::min();
  Eigen::Index count = 0;
  double q = d(0) - x;
  if (q < 0.0) ++count;
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    if (std::abs(q) < tiny) q = -tiny;
    q = d(i) - x - e(i - 1) * e(i - 1) / q;
    if (q < 0.0) ++count;
  }
  return count;
}

// Solves (T - shift) y = b in place with partial pivoting.
void tridiagonal_solve(const VectorXd& d, const VectorXd& e, double shift, double pivot_floor, VectorXd& b) {
  const Eigen::Index n = d.size();
  VectorXd diag = d.array() - shift, up = VectorXd::Zero(n), up2 = VectorXd::Zero(n), low = e;
  up.head(n - 1) = e;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(low(i)) > std::abs(diag(i))) {
      // Row swap brings the sub-diagonal entry up as the pivot.
      std::swap(b(i), b(i + 1));
      const double d_next = diag(i + 1), u_next = i + 2 < n ? up(i + 1) : 0.0;
      diag(i + 1) = up(i);
      up(i) = d_next;
      up2(i) = u_next;
      if (i + 2 < n) up(i + 1) = 0.0;
      std::swap(diag(i), low(i));
    }
    if (std::abs(diag(i)) < pivot_floor) diag(i) = pivot_floor;
    const double f = low(i) / diag(i);
    diag(i + 1) -= f * up(i);
    if (i + 2 < n) up(i + 1) -= f * up2(i);
    b(i + 1) -= f * b(i);
  }
  if (std::abs(diag(n - 1)) < pivot_floor) diag(n - 1) = pivot_floor;
  b(n - 1) /= diag(n - 1);
  if (n > 1) b(n - 2) = (b(n - 2) - up(n - 2) * b(n - 1)) / diag(n - 2);
  for (Eigen::Index i = n - 3; i >= 0; --i) b(i) = (b(i) - up(i) * b(i + 1) - up2(i) * b(i + 2)) / diag(i);
}

// Lowest `count` eigenpairs of a dense symmetric matrix: tridiagonalize once, then
// bisection plus inverse iteration, and back-transform only the requested vectors.
void lowest_eigenpairs(const MatrixXd& h, Eigen::Index count, VectorXd& values, MatrixXd& vectors) {
  const Eigen::Index n = h.rows();
  Eigen::Tridiagonalization<MatrixXd> tri(h);
  const VectorXd d = tri.diagonal();
  const VectorXd e = tri.subDiagonal();

  double lo = d(0), hi = d(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(e(i - 1)) : 0.0) + (i + 1 < n ? std::abs(e(i)) : 0.0);
    lo = std::min(lo, d(i) - r);
    hi = std::max(hi, d(i) + r);
  }
  const double norm = std::max(std::abs(lo), std::abs(hi));
  const double eps = std::numeric_limits<double>::epsilon();

  values.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    double a = k > 0 ? values(k - 1) : lo, b = hi;
    for (int it = 0; it < 200 && b - a > 2.0 * eps * std::max(std::abs(a), std::abs(b)) + eps * eps * norm; ++it) {
      const double mid = 0.5 * (a + b);
      (sturm_count(d, e, mid) > k ? b : a) = mid;
    }
    values(k) = 0.5 * (a + b);
  }

  MatrixXd y(n, count);
  const double cluster = 1e-3 * norm;
  for (Eigen::Index k = 0; k < count; ++k) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i * (k + 3)));
    for (int it = 0; it < 4; ++it) {
      tridiagonal_solve(d, e, values(k), eps * norm, v);
      for (Eigen::Index j = k - 1; j >= 0 && values(k) - values(j) < cluster; --j) v -= y.col(j).dot(v) * y.col(j);
      v.normalize();
    }
    y.col(k) = v;
  }
  vectors = tri.matrixQ() * y;
}

}  // namespace

std::string to_string(Discretization d) {
  return d == Discretization::sine_dvr ? "sine-dvr" : "central-difference";
}

Discretization discretization_from_string(const std::string& name) {
  if (name == "sine-dvr") return Discretization::sine_dvr;
  if (name == "central-difference") return Discretization::central_difference;
  throw ConfigError("unknown discretization '" + name + "' (expected sine-dvr or central-difference)");
}

void GridSpec::validate() const {
  if (n_points < 64) throw ConfigError("grid: n_points must be >= 64");
  if (!(x_max > x_min)) throw ConfigError("grid: require x_min < x_max");
}

StationaryStateSet solve_states(const sim::Potential& pot, const GridSpec& grid, std::size_t n_states,
                                const Units& units, Discretization method) {
  grid.validate();
  if (!(units.hbar > 0.0) || !(units.m > 0.0)) throw ConfigError("solve_states: hbar and m must be > 0");
  if (n_states < 1 || n_states > grid.n_points / 4) {
    throw ConfigError("solve_states: need 1 <= n_states <= n_points / 4");
  }

  MatrixXd h = method == Discretization::sine_dvr ? kinetic_sine_dvr(grid, units)
                                                   : kinetic_central_difference(grid, units);
  const auto n = static_cast<Eigen::Index>(grid.n_points);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) += pot.value(grid.node(static_cast<std::size_t>(i)));

  const auto ns = static_cast<Eigen::Index>(n_states);
  VectorXd w;
  MatrixXd z;
  lowest_eigenpairs(h, ns, w, z);

  StationaryStateSet states;
  states.grid = grid;
  states.units = units;
  states.energies = w;
  states.wavefunctions = z / std::sqrt(grid.spacing());

  for (Eigen::Index k = 0; k < ns; ++k) {
    auto col = states.wavefunctions.col(k);
    const double peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-8 * peak) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
    const double edge = std::max(std::abs(col(0)), std::abs(col(n - 1)));
    if (edge > 1e-6 * peak) {
      throw DomainError("solve_states: state " + std::to_string(k) +
                        " reaches the hard walls; enlarge the domain");
    }
    if (k > 0 && !(states.energies(k) > states.energies(k - 1))) {
      throw Error("solve_states: energies not strictly increasing at state " + std::to_string(k));
    }
  }
  return states;
}

TransitionData transition_data(const StationaryStateSet& states) {
  const auto n = static_cast<Eigen::Index>(states.size());
  const auto np = static_cast<Eigen::Index>(states.grid.n_points);
  const double h = states.grid.spacing();
  VectorXd weight(np);
  for (Eigen::Index i = 0; i < np; ++i) weight(i) = states.grid.node(static_cast<std::size_t>(i)) * h;

  TransitionData data;
  data.hbar = states.units.hbar;
  data.m = states.units.m;
  data.energies = states.energies;
  data.omega.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      data.omega(r, c) = (states.energies(c) - states.energies(r)) / data.hbar;
    }
  }
  data.x = grid_matrix_element(states.wavefunctions, weight, n).cast<std::complex<double>>();
  data.p.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      data.p(r, c) = std::complex<double>(0.0, -data.m * data.omega(r, c)) * data.x(r, c);
    }
  }
  return data;
}

OperatorMatrices matrices(const TransitionData& data, std::size_t n_trunc) {
  if (n_trunc < 1 || n_trunc > data.size()) throw ShapeError("matrices: n_trunc exceeds available states");
  const auto n = static_cast<Eigen::Index>(n_trunc);
  OperatorMatrices out;
  out.X = data.x.topLeftCorner(n, n);
  out.P = data.p.topLeftCorner(n, n);
  out.H = data.energies.head(n).cast<std::complex<double>>().asDiagonal();
  return out;
}

MatrixXcd force_matrix(const StationaryStateSet& states, const sim::Potential& pot, std::size_t n_trunc) {
  if (n_trunc < 1 || n_trunc > states.size()) throw ShapeError("force_matrix: n_trunc exceeds available states");
  const auto np = static_cast<Eigen::Index>(states.grid.n_points);
  const double h = states.grid.spacing();
  VectorXd weight(np);
  for (Eigen::Index i = 0; i < np; ++i) weight(i) = pot.force(states.grid.node(static_cast<std::size_t>(i))) * h;
  return grid_matrix_element(states.wavefunctions, weight, static_cast<Eigen::Index>(n_trunc))
      .cast<std::complex<double>>();
}

double harmonic_energy(std::size_t n, double omega0, const Units& units) {
  return units.hbar * omega0 * (static_cast<double>(n) + 0.5);
}

double harmonic_position_element(std::size_t n, std::size_t k, double omega0, const Units& units) {
  if (n + 1 != k && k + 1 != n) return 0.0;
  return std::sqrt(static_cast<double>(std::max(n, k)) * units.hbar / (2.0 * units.m * omega0));
}

nlohmann::json to_json(const TransitionData& data) {
  nlohmann::json energies = nlohmann::json::array();
  for (Eigen::Index i = 0; i < data.energies.size(); ++i) energies.push_back(data.energies(i));
  return {{"hbar", data.hbar},
          {"m", data.m},
          {"energies", energies},
          {"omega", matrix_to_json(data.omega)},
          {"x_re", matrix_to_json(data.x.real())},
          {"x_im", matrix_to_json(data.x.imag())},
          {"p_re", matrix_to_json(data.p.real())},
          {"p_im", matrix_to_json(data.p.imag())}};
}

TransitionData transition_data_from_json(const nlohmann::json& doc) {
  TransitionData data;
  try {
    data.hbar = doc.at("hbar").get<double>();
    data.m = doc.at("m").get<double>();
    const auto& e = doc.at("energies");
    const auto n = static_cast<Eigen::Index>(e.size());
    data.energies.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) data.energies(i) = e[static_cast<std::size_t>(i)].get<double>();
    data.omega = matrix_from_json(doc.at("omega"), n, "omega");
    data.x = matrix_from_json(doc.at("x_re"), n, "x_re").cast<std::complex<double>>() +
             std::complex<double>(0.0, 1.0) * matrix_from_json(doc.at("x_im"), n, "x_im").cast<std::complex<double>>();
    data.p = matrix_from_json(doc.at("p_re"), n, "p_re").cast<std::complex<double>>() +
             std::complex<double>(0.0, 1.0) * matrix_from_json(doc.at("p_im"), n, "p_im").cast<std::complex<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("transition data: ") + ex.what());
  }
  if (!(data.hbar > 0.0) || !(data.m > 0.0)) throw ConfigError("transition data: hbar and m must be > 0");
  const auto n = data.energies.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (data.omega(i, k) != -data.omega(k, i)) throw ConfigError("transition data: omega is not antisymmetric");
      if (data.x(i, k) != std::conj(data.x(k, i)) || data.p(i, k) != std::conj(data.p(k, i))) {
        throw ConfigError("transition data: x or p is not Hermitian");
      }
      const auto expected = std::complex<double>(0.0, -data.m * data.omega(i, k)) * data.x(i, k);
      if (std::abs(data.p(i, k) - expected) > 1e-12 * std::abs(expected)) {
        throw ConfigError("transition data: p is not -i m omega x");
      }
    }
  }
  return data;
}

}  // namespace zpflab::spectral

namespace zpflab::spectral {

double orthonormality_error(const StationaryStateSet& states) {
  const MatrixXd gram = states.wavefunctions.transpose() * states.wavefunctions * states.grid.spacing();
  return (gram - MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

TransitionData truncate(const TransitionData& data, std::size_t n) {
  if (n < 1 || n > data.size()) throw ShapeError("truncate: n exceeds available states");
  const auto k = static_cast<Eigen::Index>(n);
  TransitionData out;
  out.hbar = data.hbar;
  out.m = data.m;
  out.energies = data.energies.head(k);
  out.omega = data.omega.topLeftCorner(k, k);
  out.x = data.x.topLeftCorner(k, k);
  out.p = data.p.topLeftCorner(k, k);
  return out;
}

}  // namespace zpflab::spectral
