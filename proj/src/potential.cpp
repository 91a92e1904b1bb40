#include "zpflab/potential.hpp"

#include <cmath>

#include "zpflab/error.hpp"
#include "zpflab/format.hpp"

namespace zpflab::sim {

Potential Potential::harmonic(double omega0, double mass) {
  if (!(omega0 > 0.0) || !(mass > 0.0)) throw ConfigError("harmonic potential: omega0 and mass must be > 0");
  Potential pot;
  pot.kind_ = Kind::harmonic;
  pot.omega0_ = omega0;
  pot.coeffs_ = {0.5 * mass * omega0 * omega0};
  return pot;
}

Potential Potential::polynomial(std::vector<double> coefficients) {
  while (!coefficients.empty() && coefficients.back() == 0.0) coefficients.pop_back();
  if (coefficients.empty()) throw ConfigError("polynomial potential: all coefficients are zero");
  const std::size_t degree = coefficients.size() + 1;
  if (degree % 2 != 0 || !(coefficients.back() > 0.0)) {
    throw ConfigError("polynomial potential: leading term must be an even power with positive coefficient");
  }
  Potential pot;
  pot.kind_ = Kind::polynomial;
  pot.coeffs_ = std::move(coefficients);
  return pot;
}

double Potential::value(double x) const {
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
  return acc * x * x;
}

double Potential::force(double x) const {
  // V' = sum_j j c_j x^(j-1), j = i + 2
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + static_cast<double>(i + 2) * coeffs_[i];
  return -acc * x;
}

double Potential::force_derivative(double x) const {
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    acc = acc * x + static_cast<double>((i + 2) * (i + 1)) * coeffs_[i];
  }
  return -acc;
}

std::string Potential::describe() const {
  std::string out = kind_ == Kind::harmonic ? "harmonic(" + format_number(omega0_) + ")" : "polynomial(";
  if (kind_ == Kind::polynomial) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i > 0) out += ",";
      out += format_number(coeffs_[i]);
    }
    out += ")";
  } else {
    out += "[" + format_number(coeffs_[0]) + "]";
  }
  return out;
}

}  // namespace zpflab::sim
