#pragma once

#include <algorithm>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/content/scenario.hpp"

namespace shieldup {

using json = nlohmann::json;

namespace detail {

inline json parse_json_document(std::string_view doc) {
  try {
    return json::parse(doc.begin(), doc.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::Syntax, "byte " + std::to_string(e.byte), e.what());
  }
}

template <typename E>
E enum_value(const json& v, const std::string& path);

// Field reader that reports the dotted path of whatever is wrong.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw Error(Errc::Schema, path_.empty() ? "<root>" : path_, "expected object");
  }

  void require_keys(std::initializer_list<std::string_view> required,
                    std::initializer_list<std::string_view> optional = {}) const {
    for (auto key : required) {
      if (!obj_.contains(key)) throw Error(Errc::Schema, at(key), "missing field");
    }
    for (const auto& [key, _] : obj_.items()) {
      const bool known =
          std::find(required.begin(), required.end(), key) != required.end() ||
          std::find(optional.begin(), optional.end(), key) != optional.end();
      if (!known) throw Error(Errc::Schema, at(key), "unknown field");
    }
  }

  bool has(std::string_view key) const { return obj_.contains(key) && !obj_.at(std::string(key)).is_null(); }

  const json& raw(std::string_view key) const { return obj_.at(std::string(key)); }

  std::string text(std::string_view key, bool non_empty = false) const {
    const json& v = raw(key);
    if (!v.is_string()) throw Error(Errc::Schema, at(key), "expected string");
    auto s = v.get<std::string>();
    if (non_empty && s.empty()) throw Error(Errc::Schema, at(key), "must not be empty");
    return s;
  }

  bool boolean(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_boolean()) throw Error(Errc::Schema, at(key), "expected boolean");
    return v.get<bool>();
  }

  long long integer(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw Error(Errc::Schema, at(key), "expected integer");
    return v.get<long long>();
  }

  const json& array(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw Error(Errc::Schema, at(key), "expected array");
    return v;
  }

  const json& object(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_object()) throw Error(Errc::Schema, at(key), "expected object");
    return v;
  }

  template <typename E>
  E enumeration(std::string_view key) const {
    return enum_value<E>(raw(key), at(key));
  }

  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

 private:
  const json& obj_;
  std::string path_;
};

template <typename E>
E enum_value(const json& v, const std::string& path) {
  if (!v.is_string()) throw Error(Errc::Schema, path, "expected string");
  auto parsed = lookup<E>(v.get<std::string>());
  if (!parsed) throw Error(Errc::Schema, path, "unknown value '" + v.get<std::string>() + "'");
  return *parsed;
}

template <typename E>
std::set<E> enum_set(const json& arr, const std::string& path) {
  std::set<E> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string item_path = path + "[" + std::to_string(i) + "]";
    if (!out.insert(enum_value<E>(arr[i], item_path)).second) {
      throw Error(Errc::Schema, item_path, "duplicate value");
    }
  }
  return out;
}

template <typename E>
json enum_array(const std::set<E>& values) {
  json arr = json::array();
  for (E v : values) arr.push_back(std::string(name_of(v)));
  return arr;
}

inline Node parse_node(const NodeId& id, const json& obj) {
  const std::string path = "nodes." + id;
  FieldReader r(obj, path);
  r.require_keys({"phase", "speaker", "body", "choices"}, {"tactic_tags", "terminal_outcome"});
  Node n;
  n.id = id;
  n.phase = r.enumeration<Phase>("phase");
  n.speaker = r.enumeration<Speaker>("speaker");
  n.body = r.text("body", true);
  const json& choices = r.array("choices");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    FieldReader c(choices[i], path + ".choices[" + std::to_string(i) + "]");
    c.require_keys({"id", "label", "target", "risk"});
    Choice ch{c.text("id", true), c.text("label", true), c.text("target", true),
              c.enumeration<Risk>("risk")};
    if (!seen.insert(ch.id).second) throw Error(Errc::Schema, c.at("id"), "duplicate choice id");
    n.choices.push_back(std::move(ch));
  }
  if (r.has("tactic_tags")) n.tactic_tags = enum_set<Tactic>(r.array("tactic_tags"), r.at("tactic_tags"));
  if (r.has("terminal_outcome")) n.terminal_outcome = r.enumeration<Outcome>("terminal_outcome");
  return n;
}

}  // namespace detail

// Structural checks that need the whole graph. Throws GraphError naming the
// offending node id, or one of "outcome-coverage" / "refutation-coverage".
inline void validate_graph(const ScenarioGraph& g) {
  if (!g.nodes.contains(g.root)) throw Error(Errc::Graph, g.root, "root does not resolve");

  for (const auto& [id, n] : g.nodes) {
    for (const auto& c : n.choices) {
      if (!g.nodes.contains(c.target)) {
        throw Error(Errc::Graph, c.target, "choice '" + c.id + "' of node '" + id + "' targets a missing node");
      }
    }
    if (n.terminal() != n.terminal_outcome.has_value()) {
      throw Error(Errc::Graph, id, n.terminal() ? "terminal node without terminal_outcome"
                                                : "non-terminal node with terminal_outcome");
    }
  }

  // Iterative DFS from root: detects cycles (grey target) and marks reachable.
  enum class Mark { White, Grey, Black };
  std::map<NodeId, Mark> mark;
  for (const auto& [id, _] : g.nodes) mark[id] = Mark::White;
  struct Frame {
    const Node* node;
    std::size_t next_choice;
  };
  std::vector<Frame> stack{{&g.node(g.root), 0}};
  mark[g.root] = Mark::Grey;
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next_choice == top.node->choices.size()) {
      mark[top.node->id] = Mark::Black;
      stack.pop_back();
      continue;
    }
    const NodeId& target = top.node->choices[top.next_choice++].target;
    if (mark[target] == Mark::Grey) throw Error(Errc::Graph, target, "cycle through node");
    if (mark[target] == Mark::White) {
      mark[target] = Mark::Grey;
      stack.push_back({&g.node(target), 0});
    }
  }
  for (const auto& [id, m] : mark) {
    if (m == Mark::White) throw Error(Errc::Graph, id, "node unreachable from root");
  }

  // Phase trajectory: Hook at the root, Closure at every terminal, and each
  // edge either stays in its phase or advances by exactly one.
  if (g.node(g.root).phase != Phase::Hook) throw Error(Errc::Graph, g.root, "root must be a Hook node");
  for (const auto& [id, n] : g.nodes) {
    if (n.terminal() && n.phase != Phase::Closure) {
      throw Error(Errc::Graph, id, "terminal node must be in the Closure phase");
    }
    for (const auto& c : n.choices) {
      const int from = static_cast<int>(n.phase);
      const int to = static_cast<int>(g.node(c.target).phase);
      if (to != from && to != from + 1) {
        throw Error(Errc::Graph, c.target,
                    "phase order violated on edge " + id + " -> " + c.target);
      }
    }
  }

  if (g.is_scam) {
    bool safe = false, compromised = false;
    for (const auto& [_, n] : g.nodes) {
      if (n.terminal_outcome == Outcome::Safe) safe = true;
      if (n.terminal_outcome == Outcome::Compromised) compromised = true;
    }
    if (!safe || !compromised) {
      throw Error(Errc::Graph, "outcome-coverage", "scam scenario needs a Safe and a Compromised ending");
    }
  }

  const auto cards = g.tactics_with_cards();
  for (Tactic t : g.tactics_used()) {
    if (!cards.contains(t)) {
      throw Error(Errc::Graph, "refutation-coverage",
                  "tactic " + std::string(name_of(t)) + " is used without a refutation card");
    }
  }
}

inline ScenarioGraph scenario_from_json(const json& doc) {
  using detail::FieldReader;
  FieldReader r(doc, "");
  r.require_keys({"id", "title", "scam_type", "is_scam", "level", "vulnerabilities", "root", "nodes",
                  "refutation_cards", "advisory", "quiz"});
  ScenarioGraph g;
  g.id = r.text("id", true);
  g.title = r.text("title", true);
  g.scam_type = r.enumeration<ScamType>("scam_type");
  g.is_scam = r.boolean("is_scam");
  const auto level = r.integer("level");
  if (level < 1 || level > 3) throw Error(Errc::Schema, "level", "must be 1, 2 or 3");
  g.level = static_cast<int>(level);
  g.vulnerabilities = detail::enum_set<Vulnerability>(r.array("vulnerabilities"), "vulnerabilities");
  g.root = r.text("root", true);
  for (const auto& [id, obj] : r.object("nodes").items()) {
    if (id.empty()) throw Error(Errc::Schema, "nodes", "empty node id");
    g.nodes.emplace(id, detail::parse_node(id, obj));
  }
  if (g.nodes.empty()) throw Error(Errc::Schema, "nodes", "at least one node required");

  const json& cards = r.array("refutation_cards");
  std::set<Tactic> carded;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    FieldReader c(cards[i], "refutation_cards[" + std::to_string(i) + "]");
    c.require_keys({"tactic", "text"});
    RefutationCard card{c.enumeration<Tactic>("tactic"), c.text("text", true)};
    if (!carded.insert(card.tactic).second) throw Error(Errc::Schema, c.at("tactic"), "duplicate card");
    g.refutation_cards.push_back(std::move(card));
  }
  g.advisory = r.text("advisory");

  const json& quiz = r.array("quiz");
  for (std::size_t i = 0; i < quiz.size(); ++i) {
    FieldReader q(quiz[i], "quiz[" + std::to_string(i) + "]");
    q.require_keys({"prompt", "options", "correct_index"}, {"tactic"});
    QuizQuestion question;
    question.prompt = q.text("prompt", true);
    const json& options = q.array("options");
    for (std::size_t j = 0; j < options.size(); ++j) {
      if (!options[j].is_string()) throw Error(Errc::Schema, q.at("options") + "[" + std::to_string(j) + "]", "expected string");
      question.options.push_back(options[j].get<std::string>());
    }
    if (question.options.size() < 2) throw Error(Errc::Schema, q.at("options"), "at least two options required");
    const auto idx = q.integer("correct_index");
    if (idx < 0 || idx >= static_cast<long long>(question.options.size())) {
      throw Error(Errc::Schema, q.at("correct_index"), "out of range");
    }
    question.correct_index = static_cast<int>(idx);
    if (q.has("tactic")) question.tactic = q.enumeration<Tactic>("tactic");
    g.quiz.push_back(std::move(question));
  }

  validate_graph(g);
  return g;
}

inline ScenarioGraph parse_scenario(std::string_view doc) {
  return scenario_from_json(detail::parse_json_document(doc));
}

inline json to_json(const ScenarioGraph& g) {
  json nodes = json::object();
  for (const auto& [id, n] : g.nodes) {
    json choices = json::array();
    for (const auto& c : n.choices) {
      choices.push_back({{"id", c.id}, {"label", c.label}, {"target", c.target}, {"risk", name_of(c.risk)}});
    }
    json node = {{"phase", name_of(n.phase)},
                 {"speaker", name_of(n.speaker)},
                 {"body", n.body},
                 {"choices", std::move(choices)}};
    if (!n.tactic_tags.empty()) node["tactic_tags"] = detail::enum_array(n.tactic_tags);
    if (n.terminal_outcome) node["terminal_outcome"] = name_of(*n.terminal_outcome);
    nodes[id] = std::move(node);
  }
  json cards = json::array();
  for (const auto& c : g.refutation_cards) cards.push_back({{"tactic", name_of(c.tactic)}, {"text", c.text}});
  json quiz = json::array();
  for (const auto& q : g.quiz) {
    json item = {{"prompt", q.prompt}, {"options", q.options}, {"correct_index", q.correct_index}};
    if (q.tactic) item["tactic"] = name_of(*q.tactic);
    quiz.push_back(std::move(item));
  }
  return {{"id", g.id},
          {"title", g.title},
          {"scam_type", name_of(g.scam_type)},
          {"is_scam", g.is_scam},
          {"level", g.level},
          {"vulnerabilities", detail::enum_array(g.vulnerabilities)},
          {"root", g.root},
          {"nodes", std::move(nodes)},
          {"refutation_cards", std::move(cards)},
          {"advisory", g.advisory},
          {"quiz", std::move(quiz)}};
}

inline std::string serialize_scenario(const ScenarioGraph& g) { return to_json(g).dump(2) + "\n"; }

}  // namespace shieldup
