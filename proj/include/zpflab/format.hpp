#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace zpflab {

// Scientific notation with 17 significant digits (round-trips a double).
std::string format_number(double value);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace zpflab
