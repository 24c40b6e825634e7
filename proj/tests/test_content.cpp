#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "shieldup/content/coverage.hpp"
#include "shieldup/content/parse.hpp"
#include "shieldup/content/taxonomy.hpp"
#include "shieldup/content/vuj.hpp"
#include "shieldup/engine/session.hpp"
#include "shieldup/engine/view.hpp"
#include "shieldup/sdat/sdat.hpp"
#include "support.hpp"

using namespace shieldup;
using namespace testing_support;
using nlohmann::json;

namespace {

const ScenarioGraph& demo(std::string_view id) {
  const ScenarioGraph* g = demo_corpus().find(id);
  if (!g) throw std::runtime_error("missing demo scenario " + std::string(id));
  return *g;
}

Timestamp t0() { return parse_rfc3339("2024-06-03T09:00:00Z"); }

json refund_doc() { return json::parse(read_file(corpus_dir() / "scenarios" / "refund-helpdesk.json")); }

}  // namespace

TEST(Fixtures, EveryInvalidScenarioIsRejectedWithItsClassAndSubject) {
  const json manifest = json::parse(read_file(fixtures_dir() / "invalid" / "manifest.json"));
  ASSERT_GE(manifest.size(), 20u);
  for (const auto& [name, expect] : manifest.items()) {
    SCOPED_TRACE(name);
    const std::string text = read_file(fixtures_dir() / "invalid" / (name + ".json"));
    try {
      parse_scenario(text);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(to_string(e.code()), expect.at("code").get<std::string>() + "Error");
      const auto subject = expect.at("subject").get<std::string>();
      if (e.code() == Errc::Syntax) {
        EXPECT_EQ(e.subject().rfind(subject, 0), 0u) << e.subject();
      } else {
        EXPECT_EQ(e.subject(), subject);
      }
    }
  }
}

TEST(Parse, MissingFieldUsesDottedPath) {
  json doc = refund_doc();
  doc["nodes"]["ask"]["choices"][1].erase("target");
  try {
    scenario_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Schema);
    EXPECT_EQ(e.subject(), "nodes.ask.choices[1].target");
  }
}

TEST(Parse, SyntaxErrorCarriesByteOffset) {
  try {
    parse_scenario("{\"id\": \"x\",, }");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Syntax);
    EXPECT_EQ(e.subject(), "byte 12");
  }
}

TEST(Parse, RoundTripIsIdentity) {
  for (const auto& g : demo_corpus().scenarios) {
    SCOPED_TRACE(g.id);
    const std::string once = serialize_scenario(g);
    const ScenarioGraph again = parse_scenario(once);
    EXPECT_EQ(again, g);
    EXPECT_EQ(serialize_scenario(again), once);
  }
}

TEST(Parse, GenuineScenarioNeedsNoCompromisedEnding) {
  const ScenarioGraph& g = demo("bank-balance-alert");
  EXPECT_FALSE(g.is_scam);
  for (const auto& [_, n] : g.nodes) EXPECT_NE(n.terminal_outcome, Outcome::Compromised);
}

TEST(Corpus, DemoCorpusLoadsCleanAndCoversEverything) {
  const Corpus& c = demo_corpus();
  EXPECT_TRUE(c.failures.empty());
  ASSERT_TRUE(c.taxonomy.has_value());
  const CoverageReport r = lint_corpus(c.scenarios);
  EXPECT_TRUE(r.clean());
  EXPECT_EQ(r.tactics_covered(), 6);
  EXPECT_EQ(r.levels_covered(), 3);
  EXPECT_EQ(r.scenario_count, static_cast<int>(c.scenarios.size()));
}

TEST(Corpus, LintFlagsMissingTacticsAndLevels) {
  std::vector<ScenarioGraph> only_level_one;
  for (const auto& g : demo_corpus().scenarios) {
    if (g.level == 1) only_level_one.push_back(g);
  }
  const CoverageReport r = lint_corpus(only_level_one);
  EXPECT_FALSE(r.clean());
  EXPECT_EQ(r.empty_levels, (std::vector<int>{2, 3}));
  EXPECT_LT(r.tactics_covered(), 6);
}

TEST(Corpus, FailuresAreCollectedPerFile) {
  const auto dir = std::filesystem::temp_directory_path() / "shieldup_corpus_failures";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "scenarios");
  std::filesystem::copy_file(corpus_dir() / "scenarios" / "refund-helpdesk.json", dir / "scenarios" / "a.json");
  std::filesystem::copy_file(fixtures_dir() / "invalid" / "graph_cycle.json", dir / "scenarios" / "b.json");
  const Corpus c = load_corpus(dir);
  ASSERT_EQ(c.scenarios.size(), 1u);
  ASSERT_EQ(c.failures.size(), 1u);
  EXPECT_EQ(c.failures[0].file, "b.json");
  EXPECT_EQ(c.failures[0].code, Errc::Graph);
  std::filesystem::remove_all(dir);
}

TEST(Corpus, TaxonomyAndVujRecordsParse) {
  const Taxonomy t = Taxonomy::parse(read_file(corpus_dir() / "taxonomy.json"));
  for (Tactic tac : all_values<Tactic>()) EXPECT_FALSE(t[tac].refutation.empty());
  EXPECT_EQ(Taxonomy::parse(t.to_json().dump()).to_json(), t.to_json());

  const auto records = parse_vuj_lines(read_file(corpus_dir() / "vuj" / "stories.jsonl"));
  EXPECT_GE(records.size(), 5u);
  for (const auto& r : records) EXPECT_EQ(vuj_from_json(to_json(r), "rt"), r);
  EXPECT_THROW(parse_vuj_lines("{\"scam_type\": 3}\n"), Error);
}

TEST(Paths, InvestmentScamPathCountMatchesBruteForce) {
  const ScenarioGraph& g = demo("crypto-doubler-group");
  EXPECT_NE(g.title.find("investment"), std::string::npos);
  const json doc = json::parse(read_file(corpus_dir() / "scenarios" / "crypto-doubler-group.json"));
  const auto adj = raw_adjacency(doc);
  const auto root = doc.at("root").get<std::string>();
  EXPECT_EQ(scenario_paths(g).size(), oracle::count_paths(adj, root));
  EXPECT_EQ(longest_path_length(g), oracle::longest_path(adj, root));
}

TEST(Paths, EveryDemoScenarioMatchesBruteForce) {
  for (const auto& file : std::filesystem::directory_iterator(corpus_dir() / "scenarios")) {
    const json doc = json::parse(read_file(file.path()));
    const ScenarioGraph& g = demo(doc.at("id").get<std::string>());
    const auto adj = raw_adjacency(doc);
    const auto root = doc.at("root").get<std::string>();
    EXPECT_EQ(scenario_paths(g).size(), oracle::count_paths(adj, root)) << g.id;
  }
}

TEST(Engine, StartAtRootAndRespectLadder) {
  const ScenarioGraph& g = demo("crypto-doubler-group");
  EXPECT_THROW(start_session({"s", "p", t0()}, g, LadderState{"p", 1, {}}), Error);
  const SessionState s = start_session({"s", "p", t0()}, g, LadderState{"p", 3, {}});
  EXPECT_EQ(s.current_node, g.root);
  EXPECT_EQ(s.status, SessionStatus::Active);
  try {
    start_session({"s", "p", t0()}, g, LadderState{"p", 2, {}});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LevelLocked);
  }
}

TEST(Engine, InvalidChoiceAndCompletedSessionAreRejected) {
  const ScenarioGraph& g = demo("refund-helpdesk");
  SessionState s = start_session({"s", "p", t0()}, g, {"p", 1, {}});
  try {
    apply_choice(g, s, "no-such-choice", t0());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidChoice);
  }
  const SessionState before = s;
  RandomStream rng(3);
  const auto w = random_walk(g, rng, 100, t0());
  ASSERT_TRUE(w.live.completed());
  EXPECT_EQ(s, before);  // old state untouched
  const auto& any = g.node(g.root).choices.front().id;
  try {
    apply_choice(g, w.live, any, t0());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SessionCompleted);
  }
}

TEST(Engine, ReplayRejectsDivergentHistory) {
  const ScenarioGraph& g = demo("refund-helpdesk");
  RandomStream rng(11);
  const auto w = random_walk(g, rng, 100, t0());
  std::vector<Step> history = w.live.history;
  history[0].node = "not-the-root";
  try {
    replay(g, {"walk", "P000001", t0()}, history);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DivergentHistory);
    EXPECT_EQ(e.subject(), "step 0");
  }
  history = w.live.history;
  history.push_back(history.back());
  EXPECT_THROW(replay(g, {"walk", "P000001", t0()}, history), Error);
}

TEST(Engine, RandomWalksTerminateAndReplayExactly) {
  RandomStream rng(20240521);
  for (const auto& g : demo_corpus().scenarios) {
    const std::size_t limit = longest_path_length(g);
    for (int i = 0; i < 200; ++i) {
      const auto w = random_walk(g, rng, limit + 5, t0());
      ASSERT_TRUE(w.live.completed()) << g.id;
      ASSERT_LE(w.steps + 1, limit) << g.id;
      ASSERT_EQ(replay(g, {"walk", "P000001", t0()}, w.live.history), w.live) << g.id;
    }
  }
}

TEST(Engine, QuizAndLadder) {
  const ScenarioGraph& g = demo("refund-helpdesk");
  RandomStream rng(5);
  const auto w = random_walk(g, rng, 100, t0());
  std::vector<int> right;
  for (const auto& q : g.quiz) right.push_back(q.correct_index);
  EXPECT_THROW(grade_quiz(g, start_session({"s", "p", t0()}, g, {"p", 1, {}}), right), Error);
  const SessionState graded = grade_quiz(g, w.live, right);
  EXPECT_EQ(graded.quiz_score, static_cast<int>(g.quiz.size()));
  std::vector<int> short_answers(right.begin(), right.end() - 1);
  try {
    grade_quiz(g, w.live, short_answers);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }

  LadderState ladder{"p", 1, {}};
  ladder = complete_level(ladder, w.live);
  EXPECT_EQ(ladder.unlocked_level, 2);
  ladder = complete_level(ladder, w.live);
  EXPECT_EQ(ladder.unlocked_level, 2);
}

TEST(View, TrainingShowsCardsAndAdvisoryNoFeedbackHidesThem) {
  const ScenarioGraph& g = demo("refund-helpdesk");
  RandomStream rng(8);
  const auto w = random_walk(g, rng, 100, t0());
  const SessionView training = render_view(g, w.live, FeedbackMode::Training);
  EXPECT_FALSE(training.refutations_unlocked.empty());
  EXPECT_EQ(training.advisory, g.advisory);
  EXPECT_TRUE(training.choices.empty());
  const SessionView quiet = render_view(g, w.live, FeedbackMode::NoFeedback);
  EXPECT_TRUE(quiet.refutations_unlocked.empty());
  EXPECT_FALSE(quiet.advisory.has_value());
  EXPECT_EQ(quiet.transcript, training.transcript);
  // One line per visited node plus one per choice taken.
  EXPECT_EQ(training.transcript.size(), 2 * w.live.history.size() + 1);
  const auto events = transcript_events(w.live);
  EXPECT_EQ(events.front().at("kind"), "session_started");
  EXPECT_EQ(events.back().at("kind"), "session_completed");
}

TEST(Sdat, ShippedItemBankAssemblesParallelForms) {
  const auto items = parse_sdat_items(read_file(corpus_dir() / "sdat" / "items.json"));
  const SdatForm a = assemble_form(items, Form::A);
  const SdatForm b = assemble_form(items, Form::B);
  EXPECT_EQ(a.items.size(), 10u);
  int scam = 0;
  for (const auto& it : a.items) scam += it.is_scam;
  EXPECT_EQ(scam, 5);
  EXPECT_NO_THROW(validate_parallel_forms(a, b));
}
