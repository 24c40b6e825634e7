#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "shieldup/content/coverage.hpp"
#include "shieldup/content/scenario.hpp"
#include "shieldup/core/time.hpp"

namespace shieldup {

enum class SessionStatus { Active, Completed };

inline std::string_view name_of(SessionStatus s) { return s == SessionStatus::Active ? "Active" : "Completed"; }

// One step of a traversal: the node the choice was taken at, and the choice.
struct Step {
  NodeId node;
  std::string choice;
  Timestamp at{};

  bool operator==(const Step&) const = default;
};

struct SessionIdentity {
  std::string session_id;
  std::string participant_id;
  Timestamp started_at{};
};

// Engine operations never mutate a state in place: old state in, new state
// out. The history alone re-derives current_node, status and outcome.
struct SessionState {
  std::string session_id;
  std::string participant_id;
  std::string scenario_id;
  int level = 1;
  NodeId current_node;
  std::vector<Step> history;
  SessionStatus status = SessionStatus::Active;
  std::optional<Outcome> outcome;
  std::optional<int> quiz_score;
  Timestamp started_at{};
  std::optional<Timestamp> completed_at;

  bool completed() const { return status == SessionStatus::Completed; }

  bool operator==(const SessionState&) const = default;
};

struct LadderState {
  std::string participant_id;
  int unlocked_level = 1;
  std::set<std::string> completed_scenarios;

  bool operator==(const LadderState&) const = default;
};

inline constexpr int kMaxLevel = 3;

namespace detail {
inline void settle_if_terminal(const ScenarioGraph& g, SessionState& s, Timestamp at) {
  const Node& n = g.node(s.current_node);
  if (n.terminal()) {
    s.status = SessionStatus::Completed;
    s.outcome = n.terminal_outcome.value_or(Outcome::Safe);
    s.completed_at = at;
  }
}
}  // namespace detail

inline SessionState start_session(const SessionIdentity& id, const ScenarioGraph& g,
                                  const LadderState& ladder) {
  if (g.level > ladder.unlocked_level) {
    throw Error(Errc::LevelLocked, g.id,
                "level " + std::to_string(g.level) + " is locked (unlocked: " +
                    std::to_string(ladder.unlocked_level) + ")");
  }
  SessionState s;
  s.session_id = id.session_id;
  s.participant_id = id.participant_id;
  s.scenario_id = g.id;
  s.level = g.level;
  s.current_node = g.root;
  s.started_at = id.started_at;
  // A terminal root never passes validation; settle anyway.
  detail::settle_if_terminal(g, s, id.started_at);
  return s;
}

inline SessionState apply_choice(const ScenarioGraph& g, const SessionState& s,
                                 std::string_view choice_id, Timestamp at) {
  if (s.completed()) throw Error(Errc::SessionCompleted, s.session_id);
  const Choice* choice = g.node(s.current_node).find_choice(choice_id);
  if (!choice) {
    throw Error(Errc::InvalidChoice, std::string(choice_id),
                "not offered at node '" + s.current_node + "'");
  }
  SessionState next = s;
  next.history.push_back({s.current_node, choice->id, at});
  next.current_node = choice->target;
  detail::settle_if_terminal(g, next, at);
  return next;
}

// Rebuilds a session from its history; identical to folding apply_choice.
inline SessionState replay(const ScenarioGraph& g, const SessionIdentity& id,
                           std::span<const Step> history) {
  SessionState s = start_session(id, g, LadderState{id.participant_id, kMaxLevel, {}});
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Step& step = history[i];
    const std::string where = "step " + std::to_string(i);
    if (s.completed()) throw Error(Errc::DivergentHistory, where, "history continues past a terminal node");
    if (step.node != s.current_node) {
      throw Error(Errc::DivergentHistory, where,
                  "expected node '" + s.current_node + "', history has '" + step.node + "'");
    }
    if (!g.node(s.current_node).find_choice(step.choice)) {
      throw Error(Errc::DivergentHistory, where, "choice '" + step.choice + "' not offered");
    }
    s = apply_choice(g, s, step.choice, step.at);
  }
  return s;
}

inline int count_correct(const ScenarioGraph& g, std::span<const int> answers) {
  if (answers.size() != g.quiz.size()) {
    throw Error(Errc::LengthMismatch, g.id,
                "expected " + std::to_string(g.quiz.size()) + " answers, got " +
                    std::to_string(answers.size()));
  }
  int score = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (answers[i] == g.quiz[i].correct_index) ++score;
  }
  return score;
}

// Returns the session with quiz_score stored.
inline SessionState grade_quiz(const ScenarioGraph& g, const SessionState& s, std::span<const int> answers) {
  if (!s.completed()) throw Error(Errc::NotCompleted, s.session_id, "quiz runs after the scenario ends");
  SessionState next = s;
  next.quiz_score = count_correct(g, answers);
  return next;
}

inline LadderState complete_level(const LadderState& ladder, const SessionState& s) {
  if (!s.completed()) throw Error(Errc::NotCompleted, s.session_id);
  LadderState next = ladder;
  if (next.completed_scenarios.insert(s.scenario_id).second) {
    next.unlocked_level = std::min(kMaxLevel, std::max(next.unlocked_level, s.level + 1));
  }
  return next;
}

// Outcome (Safe = 1, Compromised = 0) plus the fraction of quiz answers right.
inline double game_score(const ScenarioGraph& g, const SessionState& s) {
  double score = s.outcome == Outcome::Safe ? 1.0 : 0.0;
  if (s.quiz_score && !g.quiz.empty()) score += static_cast<double>(*s.quiz_score) / g.quiz.size();
  return score;
}

}  // namespace shieldup
