#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/engine/session.hpp"

namespace shieldup {

// Training mode reveals refutations and the advisory; NoFeedback is how SDAT
// items are shown, so the instrument does not itself inoculate.
enum class FeedbackMode { Training, NoFeedback };

struct TranscriptMessage {
  Speaker speaker;
  std::string text;
  NodeId node;  // empty for the player's own choice lines

  bool operator==(const TranscriptMessage&) const = default;
};

struct SessionView {
  std::vector<TranscriptMessage> transcript;
  std::vector<std::pair<std::string, std::string>> choices;  // (choice id, label)
  std::vector<std::pair<Tactic, std::string>> refutations_unlocked;
  std::optional<std::string> advisory;
  SessionStatus status = SessionStatus::Active;
  std::optional<Outcome> outcome;
};

inline std::vector<NodeId> visited_nodes(const SessionState& s) {
  std::vector<NodeId> visited;
  for (const auto& step : s.history) visited.push_back(step.node);
  visited.push_back(s.current_node);
  return visited;
}

inline SessionView render_view(const ScenarioGraph& g, const SessionState& s,
                               FeedbackMode mode = FeedbackMode::Training) {
  SessionView v;
  std::set<Tactic> seen_tactics;
  auto emit_node = [&](const NodeId& id) {
    const Node& n = g.node(id);
    v.transcript.push_back({n.speaker, n.body, id});
    seen_tactics.insert(n.tactic_tags.begin(), n.tactic_tags.end());
  };
  for (const auto& step : s.history) {
    emit_node(step.node);
    const Choice* c = g.node(step.node).find_choice(step.choice);
    v.transcript.push_back({Speaker::Player, c ? c->label : step.choice, {}});
  }
  emit_node(s.current_node);

  if (!s.completed()) {
    for (const auto& c : g.node(s.current_node).choices) v.choices.emplace_back(c.id, c.label);
  }
  if (mode == FeedbackMode::Training) {
    for (Tactic t : seen_tactics) {
      const RefutationCard* card = g.card_for(t);
      v.refutations_unlocked.emplace_back(t, card ? card->text : std::string{});
    }
    if (s.completed()) v.advisory = g.advisory;
  }
  v.status = s.status;
  v.outcome = s.outcome;
  return v;
}

inline nlohmann::json to_json(const SessionView& v) {
  using nlohmann::json;
  json transcript = json::array();
  for (const auto& m : v.transcript) {
    json msg = {{"speaker", name_of(m.speaker)}, {"text", m.text}};
    if (!m.node.empty()) msg["node"] = m.node;
    transcript.push_back(std::move(msg));
  }
  json choices = json::array();
  for (const auto& [id, label] : v.choices) choices.push_back({{"id", id}, {"label", label}});
  json refutations = json::array();
  for (const auto& [t, text] : v.refutations_unlocked) refutations.push_back({{"tactic", name_of(t)}, {"text", text}});
  return {{"transcript", transcript},
          {"choices", choices},
          {"refutations_unlocked", refutations},
          {"advisory", v.advisory ? json(*v.advisory) : json(nullptr)},
          {"status", name_of(v.status)},
          {"outcome", v.outcome ? json(name_of(*v.outcome)) : json(nullptr)}};
}

inline nlohmann::json to_json(const SessionState& s) {
  using nlohmann::json;
  json history = json::array();
  for (const auto& step : s.history) {
    history.push_back({{"node", step.node}, {"choice", step.choice}, {"at", format_rfc3339(step.at)}});
  }
  return {{"session_id", s.session_id},
          {"participant_id", s.participant_id},
          {"scenario_id", s.scenario_id},
          {"level", s.level},
          {"current_node", s.current_node},
          {"history", history},
          {"status", name_of(s.status)},
          {"outcome", s.outcome ? json(name_of(*s.outcome)) : json(nullptr)},
          {"quiz_score", s.quiz_score ? json(*s.quiz_score) : json(nullptr)},
          {"started_at", format_rfc3339(s.started_at)},
          {"completed_at", s.completed_at ? json(format_rfc3339(*s.completed_at)) : json(nullptr)}};
}

// Session transcript as events {ts, session_id, kind, payload}, one JSON
// object per line when written out.
inline std::vector<nlohmann::json> transcript_events(const SessionState& s) {
  using nlohmann::json;
  std::vector<json> events;
  auto event = [&](Timestamp ts, std::string_view kind, json payload) {
    events.push_back({{"ts", format_rfc3339(ts)},
                      {"session_id", s.session_id},
                      {"kind", kind},
                      {"payload", std::move(payload)}});
  };
  event(s.started_at, "session_started",
        {{"participant_id", s.participant_id}, {"scenario_id", s.scenario_id}, {"level", s.level}});
  for (const auto& step : s.history) event(step.at, "choice", {{"node", step.node}, {"choice", step.choice}});
  if (s.completed()) {
    event(*s.completed_at, "session_completed",
          {{"outcome", name_of(*s.outcome)}, {"terminal_node", s.current_node}});
    if (s.quiz_score) event(*s.completed_at, "quiz_graded", {{"quiz_score", *s.quiz_score}});
  }
  return events;
}

}  // namespace shieldup
