#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace shieldup {

// ChromeDino is the control and the reference level in every model.
enum class Arm { ShieldUp, GeneralAwareness, ChromeDino };

inline constexpr std::array<Arm, 3> kArms{Arm::ShieldUp, Arm::GeneralAwareness, Arm::ChromeDino};

inline constexpr std::string_view name_of(Arm arm) {
  switch (arm) {
    case Arm::ShieldUp: return "ShieldUp";
    case Arm::GeneralAwareness: return "GeneralAwareness";
    case Arm::ChromeDino: return "ChromeDino";
  }
  return "?";
}

inline constexpr std::optional<Arm> parse_arm(std::string_view s) {
  for (Arm a : kArms) {
    if (name_of(a) == s) return a;
  }
  return std::nullopt;
}

inline constexpr std::size_t index_of(Arm arm) { return static_cast<std::size_t>(arm); }

// Approximate session lengths for each arm, in minutes.
inline constexpr int planned_duration_minutes(Arm arm) {
  switch (arm) {
    case Arm::ShieldUp: return 15;
    case Arm::GeneralAwareness: return 10;
    case Arm::ChromeDino: return 8;
  }
  return 0;
}

}  // namespace shieldup
