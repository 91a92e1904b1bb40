#pragma once

#include <string>
#include <vector>

namespace zpflab::sim {

// Binding potential V(x) = sum_{j>=2} c_j x^j with analytic force f = -V'.
class Potential {
 public:
  enum class Kind { harmonic, polynomial };

  // V = m omega0^2 x^2 / 2.
  static Potential harmonic(double omega0, double mass = 1.0);
  // coefficients[i] multiplies x^(i + 2). Throws ConfigError if V is not
  // binding (highest non-zero coefficient must be positive on an even power).
  static Potential polynomial(std::vector<double> coefficients);

  Kind kind() const { return kind_; }
  // Only meaningful for harmonic potentials.
  double omega0() const { return omega0_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double value(double x) const;
  double force(double x) const;
  // f'(x) = -V''(x)
  double force_derivative(double x) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::polynomial;
  double omega0_ = 0.0;
  std::vector<double> coeffs_;
};

}  // namespace zpflab::sim
