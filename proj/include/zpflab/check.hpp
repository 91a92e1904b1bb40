#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace zpflab {

// One verification result: {check_name, state_index, value, target, abs_err, tolerance, pass}.
struct VerificationCheck {
  std::string check_name;
  std::optional<long> state_index;
  double value = 0.0;
  double target = 0.0;
  double abs_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// pass iff |value - target| < tolerance.
VerificationCheck make_check(std::string name, std::optional<long> state, double value, double target,
                             double tolerance);

nlohmann::json to_json(const VerificationCheck& check);
VerificationCheck check_from_json(const nlohmann::json& doc);

}  // namespace zpflab
