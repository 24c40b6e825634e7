#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/analysis/dataset.hpp"
#include "shieldup/core/arm.hpp"
#include "shieldup/core/random.hpp"
#include "shieldup/sdat/sdat.hpp"
#include "shieldup/trial/event_log.hpp"

namespace shieldup {

struct Demographics {
  int age = 0;
  std::string gender;
  int income_level = 0;     // ordinal code, 1 = lowest
  int education_level = 0;  // ordinal code, 1 = lowest

  bool operator==(const Demographics&) const = default;
};

struct Participant {
  std::string participant_id;
  Demographics demographics;
  Timestamp enrolled_at{};

  bool operator==(const Participant&) const = default;
};

enum class TrialPhase { PreTest, Intervention, PostTest, FollowUp21 };
inline constexpr std::array<TrialPhase, 4> kTrialPhases{TrialPhase::PreTest, TrialPhase::Intervention,
                                                        TrialPhase::PostTest, TrialPhase::FollowUp21};

inline std::string_view name_of(TrialPhase p) {
  switch (p) {
    case TrialPhase::PreTest: return "PreTest";
    case TrialPhase::Intervention: return "Intervention";
    case TrialPhase::PostTest: return "PostTest";
    case TrialPhase::FollowUp21: return "FollowUp21";
  }
  return "?";
}

inline std::optional<TrialPhase> parse_trial_phase(std::string_view s) {
  for (TrialPhase p : kTrialPhases) {
    if (name_of(p) == s) return p;
  }
  return std::nullopt;
}

struct PhaseRecord {
  std::string participant_id;
  TrialPhase phase = TrialPhase::PreTest;
  std::optional<Form> form_used;
  Timestamp started_at{};
  Timestamp completed_at{};
  std::string payload_ref;
  std::optional<SdatScoreReport> score;

  bool operator==(const PhaseRecord&) const = default;
};

struct FormOrder {
  Form pre = Form::A;
  Form post = Form::B;

  Form followup() const { return pre; }
  bool operator==(const FormOrder&) const = default;
};

struct TrialConfig {
  std::uint64_t seed = 1;
  int block_size = 6;            // multiple of 3: block_size / 3 of each arm per block
  bool counterbalance_forms = true;  // false: every participant takes A then B
  int followup_min_days = 21;
  int followup_max_days = 35;
  int min_age = 18;
  int max_age = 100;
  int max_ordinal_level = 10;

  void validate() const {
    if (block_size <= 0 || block_size % 3 != 0) throw Error(Errc::InvalidConfig, "block_size", "must be a positive multiple of 3");
    if (followup_max_days < followup_min_days) throw Error(Errc::InvalidConfig, "followup_max_days", "window is empty");
  }
};

struct ParticipantState {
  Participant participant;
  std::optional<Arm> arm;
  std::optional<FormOrder> forms;
  std::vector<PhaseRecord> phases;  // completion order

  std::optional<TrialPhase> next_phase() const {
    if (phases.size() >= kTrialPhases.size()) return std::nullopt;
    return kTrialPhases[phases.size()];
  }
  const PhaseRecord* record(TrialPhase p) const {
    for (const auto& r : phases) {
      if (r.phase == p) return &r;
    }
    return nullptr;
  }
  bool complete() const { return phases.size() == kTrialPhases.size(); }

  bool operator==(const ParticipantState&) const = default;
};

// Everything derivable from the event log. Equality is what crash-recovery
// tests compare.
struct TrialState {
  std::map<std::string, ParticipantState> participants;
  std::uint64_t enrolled = 0;
  std::uint64_t assigned = 0;
  std::array<int, 3> arm_counts{};
  std::array<int, 3> form_assignments{};  // per arm, drives A/B alternation
  std::uint64_t last_seq = 0;

  bool operator==(const TrialState&) const = default;
};

inline std::string participant_id_for(std::uint64_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%06llu", static_cast<unsigned long long>(ordinal));
  return buf;
}

// Arm sequence of one randomization block: block_size / 3 of each arm,
// shuffled by a stream keyed on the block index.
inline std::vector<Arm> randomization_block(std::uint64_t seed, std::uint64_t block_index, int block_size) {
  std::vector<Arm> block;
  for (Arm arm : kArms) {
    for (int i = 0; i < block_size / 3; ++i) block.push_back(arm);
  }
  RandomStream stream = RandomStream::derive(seed, block_index, "randomization-block");
  stream.shuffle(block);
  return block;
}

namespace detail {

inline nlohmann::json score_json(const SdatScoreReport& s) {
  return {{"scam_score", s.scam_score},
          {"notscam_score", s.notscam_score},
          {"mean_compliance_scam", s.mean_compliance_scam},
          {"mean_compliance_notscam", s.mean_compliance_notscam},
          {"mean_confidence", s.mean_confidence}};
}

inline SdatScoreReport score_from_json(const nlohmann::json& j) {
  return {j.at("scam_score").get<int>(), j.at("notscam_score").get<int>(),
          j.at("mean_compliance_scam").get<double>(), j.at("mean_compliance_notscam").get<double>(),
          j.at("mean_confidence").get<double>()};
}

inline nlohmann::json demographics_json(const Demographics& d) {
  return {{"age", d.age}, {"gender", d.gender}, {"income_level", d.income_level}, {"education_level", d.education_level}};
}

inline Demographics demographics_from_json(const nlohmann::json& j) {
  return {j.at("age").get<int>(), j.at("gender").get<std::string>(), j.at("income_level").get<int>(),
          j.at("education_level").get<int>()};
}

}  // namespace detail

// The trial state machine. Every mutation validates, appends one event to the
// log, then folds that event through apply(), the function replay uses.
class Trial {
 public:
  Trial(TrialConfig config, EventLog& log) : config_(std::move(config)), log_(&log) {
    config_.validate();
    for (const auto& e : log_->events()) apply(e);
  }

  // Resume from a snapshot, folding only the events after it.
  Trial(TrialConfig config, EventLog& log, TrialState snapshot)
      : config_(std::move(config)), log_(&log), state_(std::move(snapshot)) {
    config_.validate();
    for (const auto& e : log_->events()) {
      if (e.seq > state_.last_seq) apply(e);
    }
  }

  const TrialState& state() const { return state_; }
  const TrialConfig& config() const { return config_; }

  const ParticipantState& participant(const std::string& id) const {
    auto it = state_.participants.find(id);
    if (it == state_.participants.end()) throw Error(Errc::UnknownParticipant, id);
    return it->second;
  }

  Participant enroll(const Demographics& d, Timestamp now) {
    validate_demographics(d);
    const std::string id = participant_id_for(state_.enrolled + 1);
    apply(log_->append(now, id, "enrolled", {{"demographics", detail::demographics_json(d)}}));
    return participant(id).participant;
  }

  Arm randomize(const std::string& id, Timestamp now) {
    const ParticipantState& p = participant(id);
    if (p.arm) throw Error(Errc::AlreadyAssigned, id, "arm already assigned");
    const auto block_index = state_.assigned / static_cast<std::uint64_t>(config_.block_size);
    const auto position = state_.assigned % static_cast<std::uint64_t>(config_.block_size);
    const Arm arm = randomization_block(config_.seed, block_index, config_.block_size)[position];
    apply(log_->append(now, id, "randomized",
                       {{"arm", name_of(arm)}, {"block", block_index}, {"position", position}}));
    return arm;
  }

  FormOrder assign_form_order(const std::string& id, Timestamp now) {
    const ParticipantState& p = participant(id);
    if (!p.arm) throw Error(Errc::NotAssigned, id, "randomize before assigning forms");
    if (p.forms) throw Error(Errc::AlreadyAssigned, id, "form order already assigned");
    FormOrder order;
    if (config_.counterbalance_forms && state_.form_assignments[index_of(*p.arm)] % 2 == 1) {
      order = {Form::B, Form::A};
    }
    apply(log_->append(now, id, "forms_assigned", {{"pre", name_of(order.pre)}, {"post", name_of(order.post)}}));
    return order;
  }

  // Form a participant must use in a testing phase.
  Form form_for(const std::string& id, TrialPhase phase) const {
    const ParticipantState& p = participant(id);
    if (!p.forms) throw Error(Errc::NotAssigned, id, "no form order");
    return phase == TrialPhase::PostTest ? p.forms->post : p.forms->pre;
  }

  // Checks everything advance_phase would, without appending.
  void check_advance(const std::string& id, TrialPhase phase, Timestamp started_at, Timestamp completed_at) const {
    const ParticipantState& p = participant(id);
    if (!p.arm || !p.forms) throw Error(Errc::NotAssigned, id, "participant has no arm or form order yet");
    const auto expected = p.next_phase();
    if (!expected || *expected != phase) {
      throw Error(Errc::OutOfOrder, std::string(name_of(phase)),
                  expected ? "next phase is " + std::string(name_of(*expected)) : "all phases complete");
    }
    if (completed_at < started_at) throw Error(Errc::NegativeDuration, std::string(name_of(phase)));
    if (!p.phases.empty() && started_at < p.phases.back().completed_at) {
      throw Error(Errc::OutOfOrder, std::string(name_of(phase)), "starts before the previous phase completed");
    }
    if (phase == TrialPhase::FollowUp21) {
      const Timestamp post_done = p.record(TrialPhase::PostTest)->completed_at;
      if (started_at < post_done + std::chrono::days{config_.followup_min_days}) {
        throw Error(Errc::FollowupTooEarly, id,
                    "follow-up opens " + std::to_string(config_.followup_min_days) + " days after the post-test");
      }
      if (started_at > post_done + std::chrono::days{config_.followup_max_days}) {
        throw Error(Errc::FollowupWindowClosed, id);
      }
    }
  }

  PhaseRecord advance_phase(const std::string& id, TrialPhase phase, std::string payload_ref, Timestamp started_at,
                            Timestamp completed_at, std::optional<SdatScoreReport> score = std::nullopt,
                            nlohmann::json detail = nullptr) {
    check_advance(id, phase, started_at, completed_at);
    nlohmann::json payload = {{"phase", name_of(phase)},
                              {"started_at", format_rfc3339(started_at)},
                              {"completed_at", format_rfc3339(completed_at)},
                              {"payload_ref", std::move(payload_ref)}};
    if (phase != TrialPhase::Intervention) payload["form"] = name_of(form_for(id, phase));
    if (score) payload["score"] = detail::score_json(*score);
    if (!detail.is_null()) payload["detail"] = std::move(detail);
    apply(log_->append(completed_at, id, "phase_completed", std::move(payload)));
    return participant(id).phases.back();
  }

  // Folds one event. Unknown kinds (service-level events sharing the log)
  // only advance last_seq.
  void apply(const Event& e) {
    if (e.seq <= state_.last_seq) throw Error(Errc::CorruptLog, std::to_string(e.seq), "event applied out of order");
    try {
      if (e.kind == "enrolled") {
        ParticipantState p;
        p.participant = {e.participant_id, detail::demographics_from_json(e.payload.at("demographics")), e.ts};
        if (!state_.participants.emplace(e.participant_id, std::move(p)).second) {
          throw Error(Errc::CorruptLog, e.participant_id, "participant enrolled twice");
        }
        ++state_.enrolled;
      } else if (e.kind == "randomized") {
        auto arm = parse_arm(e.payload.at("arm").get<std::string>());
        if (!arm) throw Error(Errc::CorruptLog, e.participant_id, "bad arm");
        mutable_participant(e.participant_id).arm = *arm;
        ++state_.assigned;
        ++state_.arm_counts[index_of(*arm)];
      } else if (e.kind == "forms_assigned") {
        auto& p = mutable_participant(e.participant_id);
        p.forms = FormOrder{*parse_form(e.payload.at("pre").get<std::string>()),
                            *parse_form(e.payload.at("post").get<std::string>())};
        ++state_.form_assignments[index_of(p.arm.value())];
      } else if (e.kind == "phase_completed") {
        PhaseRecord r;
        r.participant_id = e.participant_id;
        r.phase = parse_trial_phase(e.payload.at("phase").get<std::string>()).value();
        if (e.payload.contains("form")) r.form_used = parse_form(e.payload.at("form").get<std::string>());
        r.started_at = parse_rfc3339(e.payload.at("started_at").get<std::string>());
        r.completed_at = parse_rfc3339(e.payload.at("completed_at").get<std::string>());
        r.payload_ref = e.payload.at("payload_ref").get<std::string>();
        if (e.payload.contains("score")) r.score = detail::score_from_json(e.payload.at("score"));
        mutable_participant(e.participant_id).phases.push_back(std::move(r));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::CorruptLog, std::to_string(e.seq), ex.what());
    } catch (const std::bad_optional_access&) {
      throw Error(Errc::CorruptLog, std::to_string(e.seq), "invalid enum value in payload");
    }
    state_.last_seq = e.seq;
  }

  std::vector<ExportRow> export_rows() const {
    std::vector<ExportRow> rows;
    for (const auto& [id, p] : state_.participants) {
      ExportRow r;
      r.participant_id = id;
      r.arm = p.arm;
      r.age = p.participant.demographics.age;
      r.gender = p.participant.demographics.gender;
      r.income_level = p.participant.demographics.income_level;
      r.education_level = p.participant.demographics.education_level;
      auto put = [&](TrialPhase phase, ScoreSlot scam, ScoreSlot notscam) {
        const PhaseRecord* rec = p.record(phase);
        if (rec && rec->score) {
          r.score(scam) = rec->score->scam_score;
          r.score(notscam) = rec->score->notscam_score;
        }
      };
      put(TrialPhase::PreTest, ScoreSlot::PreScam, ScoreSlot::PreNotScam);
      put(TrialPhase::PostTest, ScoreSlot::PostScam, ScoreSlot::PostNotScam);
      put(TrialPhase::FollowUp21, ScoreSlot::FuScam, ScoreSlot::FuNotScam);
      if (p.forms) {
        r.pre_form = name_of(p.forms->pre);
        r.post_form = name_of(p.forms->post);
      }
      r.complete = p.complete();
      rows.push_back(std::move(r));
    }
    return rows;
  }

 private:
  void validate_demographics(const Demographics& d) const {
    if (d.age < config_.min_age || d.age > config_.max_age) {
      throw Error(Errc::InvalidDemographics, "age",
                  "must be " + std::to_string(config_.min_age) + ".." + std::to_string(config_.max_age));
    }
    if (d.gender.empty()) throw Error(Errc::InvalidDemographics, "gender", "required");
    if (d.income_level < 1 || d.income_level > config_.max_ordinal_level) {
      throw Error(Errc::InvalidDemographics, "income_level", "ordinal code out of range");
    }
    if (d.education_level < 1 || d.education_level > config_.max_ordinal_level) {
      throw Error(Errc::InvalidDemographics, "education_level", "ordinal code out of range");
    }
  }

  ParticipantState& mutable_participant(const std::string& id) {
    auto it = state_.participants.find(id);
    if (it == state_.participants.end()) throw Error(Errc::CorruptLog, id, "event for unknown participant");
    return it->second;
  }

  TrialConfig config_;
  EventLog* log_;
  TrialState state_;
};

inline std::string export_dataset(const EventLog& log, const TrialConfig& config = {}) {
  EventLog copy = EventLog::parse_jsonl(log.to_jsonl());
  const Trial replayed(config, copy);
  const auto rows = replayed.export_rows();
  return write_export_csv(rows);
}

// Snapshot document: the folded state plus the sequence number it covers.
inline nlohmann::json snapshot_json(const TrialState& s) {
  using nlohmann::json;
  json participants = json::array();
  for (const auto& [id, p] : s.participants) {
    json phases = json::array();
    for (const auto& r : p.phases) {
      json rec = {{"phase", name_of(r.phase)},
                  {"started_at", format_rfc3339(r.started_at)},
                  {"completed_at", format_rfc3339(r.completed_at)},
                  {"payload_ref", r.payload_ref}};
      if (r.form_used) rec["form"] = name_of(*r.form_used);
      if (r.score) rec["score"] = detail::score_json(*r.score);
      phases.push_back(std::move(rec));
    }
    json entry = {{"participant_id", id},
                  {"demographics", detail::demographics_json(p.participant.demographics)},
                  {"enrolled_at", format_rfc3339(p.participant.enrolled_at)},
                  {"phases", phases}};
    if (p.arm) entry["arm"] = name_of(*p.arm);
    if (p.forms) entry["forms"] = {name_of(p.forms->pre), name_of(p.forms->post)};
    participants.push_back(std::move(entry));
  }
  return {{"last_seq", s.last_seq},
          {"enrolled", s.enrolled},
          {"assigned", s.assigned},
          {"arm_counts", s.arm_counts},
          {"form_assignments", s.form_assignments},
          {"participants", participants}};
}

inline TrialState snapshot_from_json(const nlohmann::json& j) {
  try {
    TrialState s;
    s.last_seq = j.at("last_seq").get<std::uint64_t>();
    s.enrolled = j.at("enrolled").get<std::uint64_t>();
    s.assigned = j.at("assigned").get<std::uint64_t>();
    s.arm_counts = j.at("arm_counts").get<std::array<int, 3>>();
    s.form_assignments = j.at("form_assignments").get<std::array<int, 3>>();
    for (const auto& entry : j.at("participants")) {
      ParticipantState p;
      const std::string id = entry.at("participant_id").get<std::string>();
      p.participant = {id, detail::demographics_from_json(entry.at("demographics")),
                       parse_rfc3339(entry.at("enrolled_at").get<std::string>())};
      if (entry.contains("arm")) p.arm = parse_arm(entry.at("arm").get<std::string>()).value();
      if (entry.contains("forms")) {
        p.forms = FormOrder{parse_form(entry.at("forms")[0].get<std::string>()).value(),
                            parse_form(entry.at("forms")[1].get<std::string>()).value()};
      }
      for (const auto& rec : entry.at("phases")) {
        PhaseRecord r;
        r.participant_id = id;
        r.phase = parse_trial_phase(rec.at("phase").get<std::string>()).value();
        r.started_at = parse_rfc3339(rec.at("started_at").get<std::string>());
        r.completed_at = parse_rfc3339(rec.at("completed_at").get<std::string>());
        r.payload_ref = rec.at("payload_ref").get<std::string>();
        if (rec.contains("form")) r.form_used = parse_form(rec.at("form").get<std::string>()).value();
        if (rec.contains("score")) r.score = detail::score_from_json(rec.at("score"));
        p.phases.push_back(std::move(r));
      }
      s.participants.emplace(id, std::move(p));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptLog, "snapshot", e.what());
  } catch (const std::bad_optional_access&) {
    throw Error(Errc::CorruptLog, "snapshot", "invalid enum value");
  }
}

}  // namespace shieldup
