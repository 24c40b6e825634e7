#pragma once

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/analysis/report.hpp"
#include "shieldup/content/corpus.hpp"
#include "shieldup/engine/session.hpp"
#include "shieldup/engine/view.hpp"
#include "shieldup/sdat/response_csv.hpp"
#include "shieldup/trial/trial.hpp"

namespace shieldup::service {

using nlohmann::json;

struct Request {
  std::string method;
  std::string path;  // without query string
  std::string body;
  std::string token;  // from "Authorization: Bearer <token>", may be empty
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;

  json json_body() const { return json::parse(body); }
};

enum class Role { Participant, Researcher };

struct ServiceConfig {
  TrialConfig trial;
  std::string researcher_token;
  std::size_t snapshot_every = 500;  // events between automatic snapshots; 0 disables
  double min_followup_fraction = 0.8;
};

// Reads the service config file. Keys: seed, block_size,
// counterbalance_forms, followup_min_days, followup_max_days,
// researcher_token, snapshot_every.
inline ServiceConfig service_config_from_json(const json& j) {
  ServiceConfig c;
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "$", "config must be a JSON object");
  static const std::vector<std::string> known{"seed",           "block_size",       "counterbalance_forms",
                                              "followup_min_days", "followup_max_days", "researcher_token",
                                              "snapshot_every"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw Error(Errc::InvalidConfig, key, "unknown key");
  }
  try {
    c.trial.seed = j.value("seed", c.trial.seed);
    c.trial.block_size = j.value("block_size", c.trial.block_size);
    c.trial.counterbalance_forms = j.value("counterbalance_forms", c.trial.counterbalance_forms);
    c.trial.followup_min_days = j.value("followup_min_days", c.trial.followup_min_days);
    c.trial.followup_max_days = j.value("followup_max_days", c.trial.followup_max_days);
    c.researcher_token = j.value("researcher_token", std::string{});
    c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, "$", e.what());
  }
  c.trial.validate();
  return c;
}

inline int http_status(Errc code) {
  switch (code) {
    case Errc::Syntax:
    case Errc::Schema:
    case Errc::MissingField:
    case Errc::InvalidDemographics:
    case Errc::MissingResponse:
    case Errc::DuplicateResponse:
    case Errc::UnknownItem:
    case Errc::InvalidResponse:
    case Errc::NegativeDuration:
    case Errc::LengthMismatch:
      return 400;
    case Errc::UnknownParticipant:
      return 404;
    case Errc::InvalidChoice:
    case Errc::SessionCompleted:
    case Errc::NotCompleted:
    case Errc::WrongForm:
    case Errc::OutOfOrder:
    case Errc::FollowupTooEarly:
    case Errc::FollowupWindowClosed:
    case Errc::AlreadyAssigned:
    case Errc::NotAssigned:
      return 409;
    case Errc::LevelLocked:
      return 423;
    case Errc::RankDeficient:
    case Errc::DegenerateResidual:
    case Errc::InsufficientFollowup:
      return 422;
    default:
      return 500;
  }
}

inline Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

inline Response error_response(int status, std::string_view code, const std::string& subject,
                               const std::string& message) {
  return json_response(status, {{"error", code}, {"subject", subject}, {"message", message}});
}

inline Response error_response(const Error& e) {
  return error_response(http_status(e.code()), to_string(e.code()), e.subject(), e.what());
}

inline std::string random_token() {
  std::random_device rd;
  std::string out;
  char buf[9];
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    out += buf;
  }
  return out;
}

inline std::optional<TrialPhase> sdat_phase(std::string_view s) {
  if (s == "pre") return TrialPhase::PreTest;
  if (s == "post") return TrialPhase::PostTest;
  if (s == "followup21") return TrialPhase::FollowUp21;
  return std::nullopt;
}

inline TestPhase test_phase_of(TrialPhase p) {
  return p == TrialPhase::PreTest ? TestPhase::Pre : p == TrialPhase::PostTest ? TestPhase::Post : TestPhase::FollowUp21;
}

inline json phase_record_json(const PhaseRecord& r) {
  json j = {{"participant_id", r.participant_id},
            {"phase", name_of(r.phase)},
            {"started_at", format_rfc3339(r.started_at)},
            {"completed_at", format_rfc3339(r.completed_at)},
            {"payload_ref", r.payload_ref},
            {"form_used", r.form_used ? json(name_of(*r.form_used)) : json(nullptr)}};
  if (r.score) j["score"] = detail::score_json(*r.score);
  return j;
}

// Authorization and gating failures that have no domain error class.
struct Forbidden : std::runtime_error {
  Forbidden(int status, std::string code, std::string subject, const std::string& message)
      : std::runtime_error(message), status(status), code(std::move(code)), subject(std::move(subject)) {}
  int status;
  std::string code;
  std::string subject;
};

// The HTTP surface as a plain request -> response function. All state lives
// in the event log; tokens, game sessions and quiz grades are logged next to
// the trial's own events so a restart rebuilds everything by replay.
// Calls are serialized by one mutex, which makes the log appender the single
// linearization point.
class Service {
 public:
  Service(Corpus corpus, std::vector<SdatItem> sdat_items, ServiceConfig config, EventLog log,
          Clock clock = system_now, std::function<std::string()> token_source = random_token,
          std::optional<TrialState> snapshot = std::nullopt)
      : corpus_(std::move(corpus)),
        config_(std::move(config)),
        log_(std::move(log)),
        clock_(std::move(clock)),
        token_source_(std::move(token_source)) {
    forms_[0] = assemble_form(sdat_items, Form::A);
    forms_[1] = assemble_form(sdat_items, Form::B);
    validate_parallel_forms(forms_[0], forms_[1]);
    if (snapshot && snapshot->last_seq <= log_.last_seq()) {
      trial_.emplace(config_.trial, log_, std::move(*snapshot));
    } else {
      trial_.emplace(config_.trial, log_);
    }
    for (const auto& e : log_.events()) fold_service_event(e);
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& req) {
    std::lock_guard lock(mutex_);
    try {
      return route(req);
    } catch (const Forbidden& f) {
      return error_response(f.status, f.code, f.subject, f.what());
    } catch (const Error& e) {
      return error_response(e);
    } catch (const json::exception& e) {
      return error_response(400, "Schema", "body", e.what());
    }
  }

  const Trial& trial() const { return *trial_; }
  const EventLog& log() const { return log_; }
  std::size_t session_count() const { return sessions_.size(); }

  json snapshot() const {
    std::lock_guard lock(mutex_);
    return snapshot_json(trial_->state());
  }

  // Called after every mutation; the owner persists the snapshot.
  std::function<void(const json&)> on_snapshot;

 private:
  struct TokenInfo {
    Role role;
    std::string participant_id;
  };

  struct GameSession {
    SessionState state;
    std::vector<int> quiz_answers;
  };

  Response route(const Request& req) {
    std::vector<std::string> parts;
    std::size_t start = 1;
    while (start <= req.path.size()) {
      const std::size_t slash = req.path.find('/', start);
      const std::size_t end = slash == std::string::npos ? req.path.size() : slash;
      if (end > start) parts.push_back(req.path.substr(start, end - start));
      start = end + 1;
    }
    const std::string& m = req.method;
    auto is = [&](std::string_view method, std::initializer_list<std::string_view> shape) {
      if (m != method || parts.size() != shape.size()) return false;
      std::size_t i = 0;
      for (std::string_view s : shape) {
        if (s != "*" && parts[i] != s) return false;
        ++i;
      }
      return true;
    };

    if (is("GET", {"health"})) return json_response(200, {{"status", "ok"}, {"events", log_.size()}});
    if (is("POST", {"participants"})) return enroll(req);
    if (is("GET", {"me"})) return me(participant_of(req));
    if (is("GET", {"scenarios"})) return list_scenarios(participant_of(req));
    if (is("POST", {"sessions"})) return start_game(participant_of(req), req);
    if (is("POST", {"sessions", "*", "choice"})) return choose(participant_of(req), parts[1], req);
    if (is("GET", {"sessions", "*", "view"})) return view(participant_of(req), parts[1]);
    if (is("POST", {"sessions", "*", "quiz"})) return quiz(participant_of(req), parts[1], req);
    if (is("POST", {"intervention", "complete"})) return finish_game_phase(participant_of(req));
    if (is("POST", {"activity", "*"})) return activity(participant_of(req), parts[1], req);
    if (is("GET", {"sdat", "*", "form"})) return sdat_form(participant_of(req), parts[1]);
    if (is("POST", {"sdat", "*", "responses"})) return sdat_submit(participant_of(req), parts[1], req);
    if (is("GET", {"export"})) {
      require_researcher(req);
      return {200, "text/csv", write_export_csv(trial_->export_rows())};
    }
    if (is("POST", {"analyze"})) {
      require_researcher(req);
      return analyze(req);
    }
    if (is("GET", {"dashboard"})) {
      require_researcher(req);
      return dashboard();
    }
    return error_response(404, "NotFound", req.path, "no such endpoint");
  }

  // --- auth ---------------------------------------------------------------

  const TokenInfo* token_info(const Request& req) const {
    if (req.token.empty()) return nullptr;
    if (!config_.researcher_token.empty() && req.token == config_.researcher_token) {
      static const TokenInfo researcher{Role::Researcher, {}};
      return &researcher;
    }
    auto it = tokens_.find(req.token);
    return it == tokens_.end() ? nullptr : &it->second;
  }

  const ParticipantState& participant_of(const Request& req) const {
    const TokenInfo* t = token_info(req);
    if (!t) throw Forbidden(401, "Unauthorized", "token", "missing or unknown token");
    if (t->role != Role::Participant) throw Forbidden(403, "Forbidden", "role", "participant token required");
    return trial_->participant(t->participant_id);
  }

  void require_researcher(const Request& req) const {
    const TokenInfo* t = token_info(req);
    if (!t) throw Forbidden(401, "Unauthorized", "token", "missing or unknown token");
    if (t->role != Role::Researcher) throw Forbidden(403, "Forbidden", "role", "researcher token required");
  }

 private:
  // --- enrollment ---------------------------------------------------------

  Response enroll(const Request& req) {
    const json body = json::parse(req.body);
    const json& d = body.at("demographics");
    Demographics demo{d.at("age").get<int>(), d.at("gender").get<std::string>(), d.at("income_level").get<int>(),
                      d.at("education_level").get<int>()};
    const Timestamp now = clock_();
    const Participant p = trial_->enroll(demo, now);
    const Arm arm = trial_->randomize(p.participant_id, now);
    const FormOrder forms = trial_->assign_form_order(p.participant_id, now);
    std::string token = token_source_();
    while (tokens_.count(token) || token == config_.researcher_token) token = token_source_();
    append(p.participant_id, "token_issued", {{"token", token}});
    return json_response(201, {{"participant_id", p.participant_id},
                               {"token", token},
                               {"arm", name_of(arm)},
                               {"forms", {{"pre", name_of(forms.pre)}, {"post", name_of(forms.post)}}}});
  }

  Response me(const ParticipantState& p) const {
    json phases = json::array();
    for (const auto& r : p.phases) phases.push_back(phase_record_json(r));
    const auto next = p.next_phase();
    const LadderState ladder = ladder_of(p.participant.participant_id);
    return json_response(200, {{"participant_id", p.participant.participant_id},
                               {"arm", name_of(*p.arm)},
                               {"planned_duration_minutes", planned_duration_minutes(*p.arm)},
                               {"forms", {{"pre", name_of(p.forms->pre)}, {"post", name_of(p.forms->post)}}},
                               {"next_phase", next ? json(name_of(*next)) : json(nullptr)},
                               {"phases", phases},
                               {"ladder",
                                {{"unlocked_level", ladder.unlocked_level},
                                 {"completed_scenarios", ladder.completed_scenarios}}}});
  }

  // --- game ---------------------------------------------------------------

  void require_game_phase(const ParticipantState& p) const {
    if (p.arm != Arm::ShieldUp) throw Forbidden(403, "WrongArmOrPhase", "arm", "the game is only for the ShieldUp arm");
    if (p.next_phase() != TrialPhase::Intervention) {
      throw Forbidden(403, "WrongArmOrPhase", "phase", "the game is available during the intervention phase only");
    }
  }

  LadderState ladder_of(const std::string& pid) const {
    auto it = ladders_.find(pid);
    return it == ladders_.end() ? LadderState{pid, 1, {}} : it->second;
  }

  Response list_scenarios(const ParticipantState& p) const {
    require_game_phase(p);
    const LadderState ladder = ladder_of(p.participant.participant_id);
    json out = json::array();
    for (const auto& g : corpus_.scenarios) {
      out.push_back({{"scenario_id", g.id},
                     {"title", g.title},
                     {"level", g.level},
                     {"locked", g.level > ladder.unlocked_level},
                     {"completed", ladder.completed_scenarios.count(g.id) > 0}});
    }
    return json_response(200, {{"scenarios", out}, {"unlocked_level", ladder.unlocked_level}});
  }

  const ScenarioGraph& scenario(const std::string& id) const {
    const ScenarioGraph* g = corpus_.find(id);
    if (!g) throw Forbidden(404, "NotFound", id, "unknown scenario");
    return *g;
  }

  GameSession& owned_session(const ParticipantState& p, const std::string& sid) {
    auto it = sessions_.find(sid);
    // Someone else's session is indistinguishable from a missing one.
    if (it == sessions_.end() || it->second.state.participant_id != p.participant.participant_id) {
      throw Forbidden(404, "NotFound", sid, "unknown session");
    }
    return it->second;
  }

  json session_view_json(const GameSession& s) const {
    const ScenarioGraph& g = scenario(s.state.scenario_id);
    json j = to_json(render_view(g, s.state, FeedbackMode::Training));
    j["session_id"] = s.state.session_id;
    j["scenario_id"] = g.id;
    if (s.state.completed()) {
      json questions = json::array();
      for (const auto& q : g.quiz) questions.push_back({{"prompt", q.prompt}, {"options", q.options}});
      j["quiz"] = questions;
      j["quiz_score"] = s.state.quiz_score ? json(*s.state.quiz_score) : json(nullptr);
    }
    return j;
  }

  Response start_game(const ParticipantState& p, const Request& req) {
    require_game_phase(p);
    const json body = json::parse(req.body);
    const ScenarioGraph& g = scenario(body.at("scenario_id").get<std::string>());
    const std::string& pid = p.participant.participant_id;
    const Timestamp now = clock_();
    char sid[32];
    std::snprintf(sid, sizeof sid, "S%06zu", sessions_.size() + 1);
    // Validate before logging: a locked level throws here.
    start_session({sid, pid, now}, g, ladder_of(pid));
    append(pid, "session_started", {{"session_id", sid}, {"scenario_id", g.id}});
    return json_response(201, session_view_json(sessions_.at(sid)));
  }

  Response choose(const ParticipantState& p, const std::string& sid, const Request& req) {
    GameSession& s = owned_session(p, sid);
    const json body = json::parse(req.body);
    const std::string choice = body.at("choice_id").get<std::string>();
    apply_choice(scenario(s.state.scenario_id), s.state, choice, clock_());
    append(p.participant.participant_id, "session_choice", {{"session_id", sid}, {"choice_id", choice}});
    return json_response(200, session_view_json(sessions_.at(sid)));
  }

  Response view(const ParticipantState& p, const std::string& sid) {
    return json_response(200, session_view_json(owned_session(p, sid)));
  }

  Response quiz(const ParticipantState& p, const std::string& sid, const Request& req) {
    GameSession& s = owned_session(p, sid);
    const json body = json::parse(req.body);
    const auto answers = body.at("answers").get<std::vector<int>>();
    const ScenarioGraph& g = scenario(s.state.scenario_id);
    grade_quiz(g, s.state, answers);
    append(p.participant.participant_id, "quiz_graded", {{"session_id", sid}, {"answers", answers}});
    const GameSession& graded = sessions_.at(sid);
    return json_response(200, {{"session_id", sid},
                               {"quiz_score", *graded.state.quiz_score},
                               {"questions", g.quiz.size()},
                               {"game_score", game_score(g, graded.state)}});
  }

  Response finish_game_phase(const ParticipantState& p) {
    require_game_phase(p);
    const std::string& pid = p.participant.participant_id;
    std::vector<const GameSession*> done;
    std::optional<Timestamp> first;
    for (const auto& [id, s] : sessions_) {
      if (s.state.participant_id != pid) continue;
      if (!first || s.state.started_at < *first) first = s.state.started_at;
      if (s.state.completed()) done.push_back(&s);
    }
    if (done.empty()) throw Error(Errc::NotCompleted, pid, "complete at least one scenario first");
    std::string ref = "sessions:";
    for (std::size_t i = 0; i < done.size(); ++i) ref += (i ? "," : "") + done[i]->state.session_id;
    const PhaseRecord r = trial_->advance_phase(pid, TrialPhase::Intervention, ref, *first, clock_());
    after_mutation();
    return json_response(200, phase_record_json(r));
  }

  Response activity(const ParticipantState& p, const std::string& arm_name, const Request& req) {
    const auto arm = parse_arm(arm_name);
    if (!arm) throw Forbidden(404, "NotFound", arm_name, "unknown arm");
    if (*arm == Arm::ShieldUp || p.arm != *arm) {
      throw Forbidden(403, "WrongArmOrPhase", arm_name, "activity does not match the participant's arm");
    }
    if (p.next_phase() != TrialPhase::Intervention) {
      throw Forbidden(403, "WrongArmOrPhase", "phase", "not in the intervention phase");
    }
    const json body = json::parse(req.body);
    const Timestamp started = parse_rfc3339(body.at("started_at").get<std::string>());
    const Timestamp completed = parse_rfc3339(body.at("completed_at").get<std::string>());
    const std::string& pid = p.participant.participant_id;
    const auto minutes = std::chrono::duration_cast<std::chrono::seconds>(completed - started).count() / 60.0;
    const PhaseRecord r = trial_->advance_phase(pid, TrialPhase::Intervention,
                                                "activity:" + pid + ":" + std::string(name_of(*arm)), started,
                                                completed, std::nullopt, {{"duration_minutes", minutes}});
    after_mutation();
    json out = phase_record_json(r);
    out["duration_minutes"] = minutes;
    return json_response(200, out);
  }

  // --- SDAT ---------------------------------------------------------------

  TrialPhase require_sdat_phase(const ParticipantState& p, const std::string& phase_name) const {
    const auto phase = sdat_phase(phase_name);
    if (!phase) throw Forbidden(404, "NotFound", phase_name, "phase is pre, post or followup21");
    const auto next = p.next_phase();
    if (next != *phase) {
      throw Error(Errc::OutOfOrder, std::string(name_of(*phase)),
                  next ? "next phase is " + std::string(name_of(*next)) : "all phases complete");
    }
    return *phase;
  }

  const SdatForm& form(Form f) const { return forms_[f == Form::A ? 0 : 1]; }

  Response sdat_form(const ParticipantState& p, const std::string& phase_name) const {
    const TrialPhase phase = require_sdat_phase(p, phase_name);
    const Form f = trial_->form_for(p.participant.participant_id, phase);
    json items = json::array();
    for (const auto& item : form(f).items) {
      json j = {{"item_id", item.item_id}, {"scale_max", item.scale_max}};
      if (item.scenario) {
        const SessionState s = start_session({"", "", {}}, *item.scenario, {"", kMaxLevel, {}});
        SessionView v = render_view(*item.scenario, s, FeedbackMode::NoFeedback);
        v.choices.clear();
        j["view"] = to_json(v);
        j["title"] = item.scenario->title;
      }
      items.push_back(std::move(j));
    }
    return json_response(200, {{"phase", phase_name}, {"form", name_of(f)}, {"items", items}});
  }

  Response sdat_submit(const ParticipantState& p, const std::string& phase_name, const Request& req) {
    const TrialPhase phase = require_sdat_phase(p, phase_name);
    const std::string& pid = p.participant.participant_id;
    const json body = json::parse(req.body);
    const auto submitted = parse_form(body.at("form").get<std::string>());
    if (!submitted) throw Error(Errc::Schema, "form", "must be A or B");
    const Form assigned = trial_->form_for(pid, phase);
    if (*submitted != assigned) {
      throw Error(Errc::WrongForm, std::string(name_of(*submitted)),
                  "assigned form is " + std::string(name_of(assigned)));
    }
    std::vector<SdatResponse> responses;
    for (const auto& r : body.at("responses")) {
      const auto d = parse_discernment(r.at("discernment").get<std::string>());
      if (!d) throw Error(Errc::InvalidResponse, "discernment", "must be Scam or NotScam");
      responses.push_back({r.at("item_id").get<std::string>(), r.at("compliance").get<int>(), *d,
                           r.at("confidence").get<int>()});
    }
    const SdatScoreReport score = score_responses(form(assigned), responses);
    const Timestamp now = clock_();
    const Timestamp started = body.contains("started_at") ? parse_rfc3339(body.at("started_at").get<std::string>()) : now;
    json detail = json::array();
    for (const auto& r : responses) detail.push_back({r.item_id, r.compliance, name_of(r.discernment), r.confidence});
    trial_->advance_phase(pid, phase, "sdat:" + pid + ":" + std::string(name_of(test_phase_of(phase))), started, now,
                          score, {{"responses", detail}});
    after_mutation();
    return json_response(200, {{"phase", phase_name},
                               {"form", name_of(assigned)},
                               {"scam_score", score.scam_score},
                               {"notscam_score", score.notscam_score},
                               {"mean_compliance_scam", score.mean_compliance_scam},
                               {"mean_compliance_notscam", score.mean_compliance_notscam},
                               {"mean_confidence", score.mean_confidence}});
  }

  // --- researcher ---------------------------------------------------------

  Response analyze(const Request& req) const {
    const json body = req.body.empty() ? json::object() : json::parse(req.body);
    const auto outcome = parse_outcome(body.value("outcome", std::string("scam")));
    if (!outcome) throw Error(Errc::Schema, "outcome", "must be scam or notscam");
    const auto phase = parse_analysis_phase(body.value("phase", std::string("post")));
    if (!phase) throw Error(Errc::Schema, "phase", "must be post or followup");
    const auto rows = parse_export_csv(write_export_csv(trial_->export_rows()));
    return json_response(200, analysis_report(rows, *outcome, *phase));
  }

  Response dashboard() const {
    const TrialState& s = trial_->state();
    json arms = json::object();
    for (Arm a : kArms) arms[std::string(name_of(a))] = s.arm_counts[index_of(a)];
    std::map<std::string, std::array<int, 4>> funnel;
    for (Arm a : kArms) funnel[std::string(name_of(a))] = {};
    for (const auto& [_, p] : s.participants) {
      if (!p.arm) continue;
      for (const auto& r : p.phases) ++funnel[std::string(name_of(*p.arm))][static_cast<std::size_t>(r.phase)];
    }
    json f = json::object();
    for (const auto& [arm, counts] : funnel) {
      json c = json::object();
      for (TrialPhase ph : kTrialPhases) c[std::string(name_of(ph))] = counts[static_cast<std::size_t>(ph)];
      f[arm] = c;
    }
    return json_response(200, {{"enrolled", s.enrolled}, {"arm_counts", arms}, {"funnel", f}, {"events", log_.size()}});
  }

  // --- log ----------------------------------------------------------------

  void append(const std::string& pid, const std::string& kind, json payload) {
    const Event& e = log_.append(clock_(), pid, kind, std::move(payload));
    fold_service_event(e);
    trial_->apply(e);
    after_mutation();
  }

  void after_mutation() {
    if (on_snapshot && config_.snapshot_every > 0 && log_.size() % config_.snapshot_every == 0) {
      on_snapshot(snapshot_json(trial_->state()));
    }
  }

  void fold_service_event(const Event& e) {
    try {
      if (e.kind == "token_issued") {
        tokens_[e.payload.at("token").get<std::string>()] = {Role::Participant, e.participant_id};
      } else if (e.kind == "session_started") {
        const std::string sid = e.payload.at("session_id").get<std::string>();
        const ScenarioGraph& g = scenario(e.payload.at("scenario_id").get<std::string>());
        sessions_[sid] = {start_session({sid, e.participant_id, e.ts}, g, {e.participant_id, kMaxLevel, {}}), {}};
      } else if (e.kind == "session_choice") {
        GameSession& s = sessions_.at(e.payload.at("session_id").get<std::string>());
        const ScenarioGraph& g = scenario(s.state.scenario_id);
        s.state = apply_choice(g, s.state, e.payload.at("choice_id").get<std::string>(), e.ts);
        if (s.state.completed()) ladders_[e.participant_id] = complete_level(ladder_of(e.participant_id), s.state);
      } else if (e.kind == "quiz_graded") {
        GameSession& s = sessions_.at(e.payload.at("session_id").get<std::string>());
        s.quiz_answers = e.payload.at("answers").get<std::vector<int>>();
        s.state = grade_quiz(scenario(s.state.scenario_id), s.state, s.quiz_answers);
      }
    } catch (const json::exception& ex) {
      throw Error(Errc::CorruptLog, std::to_string(e.seq), ex.what());
    } catch (const std::out_of_range& ex) {
      throw Error(Errc::CorruptLog, std::to_string(e.seq), "event refers to an unknown session");
    }
  }

  Corpus corpus_;
  ServiceConfig config_;
  EventLog log_;
  Clock clock_;
  std::function<std::string()> token_source_;
  std::array<SdatForm, 2> forms_;
  std::optional<Trial> trial_;
  std::map<std::string, TokenInfo> tokens_;
  std::map<std::string, GameSession> sessions_;
  std::map<std::string, LadderState> ladders_;
  mutable std::mutex mutex_;
};

}  // namespace shieldup::service
