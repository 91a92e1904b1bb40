#include "zpflab/check.hpp"

#include <cmath>

#include "zpflab/error.hpp"

namespace zpflab {

VerificationCheck make_check(std::string name, std::optional<long> state, double value, double target,
                             double tolerance) {
  const double err = std::abs(value - target);
  return {std::move(name), state, value, target, err, tolerance, err < tolerance};
}

nlohmann::json to_json(const VerificationCheck& c) {
  nlohmann::json doc = {{"check_name", c.check_name}, {"value", c.value},       {"target", c.target},
                        {"abs_err", c.abs_err},       {"tolerance", c.tolerance}, {"pass", c.pass}};
  doc["state_index"] = c.state_index ? nlohmann::json(*c.state_index) : nlohmann::json(nullptr);
  return doc;
}

VerificationCheck check_from_json(const nlohmann::json& doc) {
  try {
    VerificationCheck c;
    c.check_name = doc.at("check_name").get<std::string>();
    if (!doc.at("state_index").is_null()) c.state_index = doc.at("state_index").get<long>();
    c.value = doc.at("value").get<double>();
    c.target = doc.at("target").get<double>();
    c.abs_err = doc.at("abs_err").get<double>();
    c.tolerance = doc.at("tolerance").get<double>();
    c.pass = doc.at("pass").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("verification check: ") + e.what());
  }
}

}  // namespace zpflab
