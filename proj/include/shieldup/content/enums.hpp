#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "shieldup/core/error.hpp"

namespace shieldup {

// Names used in every file format. Order of each table is the canonical order
// of the enum (reports iterate in this order).
template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

enum class Tactic { SocialProof, Authority, FootInTheDoor, UrgencyScarcity, EmotionalAppeal, NormActivation };
inline constexpr NameTable<Tactic, 6> kTacticNames{{
    {Tactic::SocialProof, "SocialProof"},
    {Tactic::Authority, "Authority"},
    {Tactic::FootInTheDoor, "FootInTheDoor"},
    {Tactic::UrgencyScarcity, "UrgencyScarcity"},
    {Tactic::EmotionalAppeal, "EmotionalAppeal"},
    {Tactic::NormActivation, "NormActivation"},
}};

enum class Vulnerability { TrustInAuthority, QuickRewards, LackOfAwareness, EmotionalReasoning };
inline constexpr NameTable<Vulnerability, 4> kVulnerabilityNames{{
    {Vulnerability::TrustInAuthority, "TrustInAuthority"},
    {Vulnerability::QuickRewards, "QuickRewards"},
    {Vulnerability::LackOfAwareness, "LackOfAwareness"},
    {Vulnerability::EmotionalReasoning, "EmotionalReasoning"},
}};

enum class ScamType {
  Courier,
  CustomerCare,
  Jobs,
  FriendFamilyImpersonation,
  MarketplaceShopping,
  CryptoInvestment,
  Loan,
  OtherUpi,
};
inline constexpr NameTable<ScamType, 8> kScamTypeNames{{
    {ScamType::Courier, "Courier"},
    {ScamType::CustomerCare, "CustomerCare"},
    {ScamType::Jobs, "Jobs"},
    {ScamType::FriendFamilyImpersonation, "FriendFamilyImpersonation"},
    {ScamType::MarketplaceShopping, "MarketplaceShopping"},
    {ScamType::CryptoInvestment, "CryptoInvestment"},
    {ScamType::Loan, "Loan"},
    {ScamType::OtherUpi, "OtherUpi"},
}};

// Declaration order is the trajectory order.
enum class Phase { Hook, Interaction, Closure };
inline constexpr NameTable<Phase, 3> kPhaseNames{{
    {Phase::Hook, "Hook"},
    {Phase::Interaction, "Interaction"},
    {Phase::Closure, "Closure"},
}};

enum class Speaker { Scammer, System, Narrator, Player };
inline constexpr NameTable<Speaker, 4> kSpeakerNames{{
    {Speaker::Scammer, "Scammer"},
    {Speaker::System, "System"},
    {Speaker::Narrator, "Narrator"},
    {Speaker::Player, "Player"},
}};

enum class Outcome { Safe, Compromised };
inline constexpr NameTable<Outcome, 2> kOutcomeNames{{
    {Outcome::Safe, "Safe"},
    {Outcome::Compromised, "Compromised"},
}};

enum class Risk { Safe, Risky, Neutral };
inline constexpr NameTable<Risk, 3> kRiskNames{{
    {Risk::Safe, "Safe"},
    {Risk::Risky, "Risky"},
    {Risk::Neutral, "Neutral"},
}};

enum class SourceKind { News, SocialMedia, Watchdog };
inline constexpr NameTable<SourceKind, 3> kSourceKindNames{{
    {SourceKind::News, "News"},
    {SourceKind::SocialMedia, "SocialMedia"},
    {SourceKind::Watchdog, "Watchdog"},
}};

namespace detail {
template <typename E>
constexpr const auto& names_of() {
  if constexpr (std::is_same_v<E, Tactic>) return kTacticNames;
  else if constexpr (std::is_same_v<E, Vulnerability>) return kVulnerabilityNames;
  else if constexpr (std::is_same_v<E, ScamType>) return kScamTypeNames;
  else if constexpr (std::is_same_v<E, Phase>) return kPhaseNames;
  else if constexpr (std::is_same_v<E, Speaker>) return kSpeakerNames;
  else if constexpr (std::is_same_v<E, Outcome>) return kOutcomeNames;
  else if constexpr (std::is_same_v<E, Risk>) return kRiskNames;
  else if constexpr (std::is_same_v<E, SourceKind>) return kSourceKindNames;
}
}  // namespace detail

template <typename E>
constexpr std::string_view name_of(E value) {
  for (const auto& [v, n] : detail::names_of<E>()) {
    if (v == value) return n;
  }
  return "?";
}

template <typename E>
constexpr std::optional<E> lookup(std::string_view name) {
  for (const auto& [v, n] : detail::names_of<E>()) {
    if (n == name) return v;
  }
  return std::nullopt;
}

template <typename E>
constexpr auto all_values() {
  constexpr const auto& table = detail::names_of<E>();
  std::array<E, table.size()> out{};
  for (std::size_t i = 0; i < table.size(); ++i) out[i] = table[i].first;
  return out;
}

}  // namespace shieldup
