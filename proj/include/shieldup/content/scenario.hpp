#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shieldup/content/enums.hpp"

namespace shieldup {

using NodeId = std::string;

struct Choice {
  std::string id;
  std::string label;
  NodeId target;
  Risk risk = Risk::Neutral;

  bool operator==(const Choice&) const = default;
};

struct Node {
  NodeId id;
  Phase phase = Phase::Hook;
  Speaker speaker = Speaker::Narrator;
  std::string body;
  std::vector<Choice> choices;
  std::set<Tactic> tactic_tags;
  std::optional<Outcome> terminal_outcome;

  bool terminal() const { return choices.empty(); }
  const Choice* find_choice(std::string_view choice_id) const {
    for (const auto& c : choices) {
      if (c.id == choice_id) return &c;
    }
    return nullptr;
  }

  bool operator==(const Node&) const = default;
};

struct RefutationCard {
  Tactic tactic;
  std::string text;

  bool operator==(const RefutationCard&) const = default;
};

struct QuizQuestion {
  std::string prompt;
  std::vector<std::string> options;
  int correct_index = 0;
  std::optional<Tactic> tactic;

  bool operator==(const QuizQuestion&) const = default;
};

// Immutable after parse_scenario; every invariant below holds for any value
// that parse_scenario returns.
//  - DAG reachable from root, no orphans, all targets resolve
//  - root is Hook, terminals are Closure, each edge keeps or advances phase by one
//  - terminals (no choices) carry an outcome, non-terminals do not
//  - scam scenarios have at least one Safe and one Compromised terminal
//  - every tagged tactic has a refutation card
struct ScenarioGraph {
  std::string id;
  std::string title;
  ScamType scam_type = ScamType::OtherUpi;
  bool is_scam = true;
  int level = 1;
  std::set<Vulnerability> vulnerabilities;
  NodeId root;
  std::map<NodeId, Node> nodes;
  std::vector<RefutationCard> refutation_cards;
  std::string advisory;
  std::vector<QuizQuestion> quiz;

  const Node& node(const NodeId& id) const { return nodes.at(id); }

  std::set<Tactic> tactics_used() const {
    std::set<Tactic> used;
    for (const auto& [_, n] : nodes) used.insert(n.tactic_tags.begin(), n.tactic_tags.end());
    return used;
  }

  std::set<Tactic> tactics_with_cards() const {
    std::set<Tactic> out;
    for (const auto& card : refutation_cards) out.insert(card.tactic);
    return out;
  }

  const RefutationCard* card_for(Tactic t) const {
    for (const auto& card : refutation_cards) {
      if (card.tactic == t) return &card;
    }
    return nullptr;
  }

  bool operator==(const ScenarioGraph&) const = default;
};

}  // namespace shieldup
