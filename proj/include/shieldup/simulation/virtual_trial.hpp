#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "shieldup/sdat/response_csv.hpp"
#include "shieldup/simulation/cohort.hpp"
#include "shieldup/trial/trial.hpp"

namespace shieldup::sim {

struct VirtualTrial {
  EventLog log;
  std::vector<SyntheticParticipant> cohort;
  std::vector<ResponseRecord> responses;  // every SDAT answer, in log order
};

inline Timestamp default_trial_start() { return parse_rfc3339("2024-06-03T09:00:00Z"); }

namespace detail {

inline std::vector<std::pair<SdatItem, IrtItemParams>> form_items(const CohortConfig& cfg, Form form) {
  const auto candidates = bank_items(cfg);
  const SdatForm f = assemble_form(candidates, form);
  std::vector<std::pair<SdatItem, IrtItemParams>> out;
  for (const auto& item : f.items) out.emplace_back(item, bank_entry(cfg, item.storyline_id).params);
  return out;
}

inline nlohmann::json responses_json(const std::vector<SdatResponse>& rs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rs) arr.push_back({r.item_id, r.compliance, name_of(r.discernment), r.confidence});
  return arr;
}

}  // namespace detail

// Drives the trial module for the whole cohort on a manual clock: enrollment,
// pre-test, placeholder intervention and post-test per participant, then one
// 21-day jump and the follow-ups for everyone who did not attrit.
// `log` may be file-backed; it must be empty. `observe` sees the trial after
// every appended event.
inline VirtualTrial run_virtual_trial(const CohortConfig& cfg, EventLog log = {},
                                      Timestamp start = default_trial_start(),
                                      const std::function<void(const Trial&)>& observe = {}) {
  if (log.size() != 0) throw Error(Errc::InvalidConfig, "log", "virtual trial needs an empty event log");
  VirtualTrial out;
  out.cohort = generate_cohort(cfg);
  out.log = std::move(log);
  TrialConfig tcfg = cfg.trial;
  tcfg.seed = cfg.seed;
  Trial trial(tcfg, out.log);
  auto seen = [&] {
    if (observe) observe(trial);
  };

  const std::array<std::vector<std::pair<SdatItem, IrtItemParams>>, 2> items{detail::form_items(cfg, Form::A),
                                                                             detail::form_items(cfg, Form::B)};
  std::array<SdatForm, 2> forms;
  for (int f = 0; f < 2; ++f) {
    forms[f].form = f == 0 ? Form::A : Form::B;
    for (const auto& [item, _] : items[f]) forms[f].items.push_back(item);
  }

  ManualClock clock(start);
  constexpr auto kTestDuration = std::chrono::minutes{6};
  constexpr auto kEnrollmentGap = std::chrono::seconds{10};

  auto sit_test = [&](const SyntheticParticipant& sp, const std::string& id, TrialPhase phase, PhaseIndex at,
                      const char* purpose, TestPhase test_phase) {
    const Form form = trial.form_for(id, phase);
    const auto& form_items = items[form == Form::A ? 0 : 1];
    RandomStream rng = RandomStream::derive(cfg.seed, sp.ordinal, purpose);
    const auto responses = respond_2pl(sp.theta_scam[at], sp.theta_notscam[at], form_items, rng);
    const SdatScoreReport score = score_responses(forms[form == Form::A ? 0 : 1], responses);
    const Timestamp begin = clock.now();
    clock.advance(kTestDuration);
    trial.advance_phase(id, phase, "sdat:" + id + ":" + std::string(name_of(test_phase)), begin, clock.now(), score,
                        {{"responses", detail::responses_json(responses)}});
    seen();
    for (std::size_t k = 0; k < responses.size(); ++k) {
      const SdatItem& item = form_items[k].first;
      out.responses.push_back({id, form, item.item_id, item.storyline_id, item.is_scam, responses[k].compliance,
                               responses[k].discernment, responses[k].confidence, test_phase});
    }
  };

  std::vector<std::string> ids;
  Timestamp last_post{};
  for (const auto& sp : out.cohort) {
    clock.set(start + kEnrollmentGap * static_cast<long>(sp.ordinal - 1));
    const Participant p = trial.enroll(sp.demographics, clock.now());
    seen();
    const Arm arm = trial.randomize(p.participant_id, clock.now());
    seen();
    if (arm != sp.arm) throw Error(Errc::CorruptLog, p.participant_id, "cohort and trial randomization disagree");
    trial.assign_form_order(p.participant_id, clock.now());
    seen();
    sit_test(sp, p.participant_id, TrialPhase::PreTest, kPre, "responses-pre", TestPhase::Pre);
    const Timestamp begin = clock.now();
    clock.advance(std::chrono::minutes{planned_duration_minutes(arm)});
    trial.advance_phase(p.participant_id, TrialPhase::Intervention,
                        "activity:" + p.participant_id + ":" + std::string(name_of(arm)), begin, clock.now());
    seen();
    sit_test(sp, p.participant_id, TrialPhase::PostTest, kPost, "responses-post", TestPhase::Post);
    last_post = std::max(last_post, clock.now());
    ids.push_back(p.participant_id);
  }

  const Timestamp followup_open = last_post + std::chrono::days{tcfg.followup_min_days};
  for (std::size_t i = 0; i < out.cohort.size(); ++i) {
    const auto& sp = out.cohort[i];
    if (sp.attrits) continue;
    clock.set(followup_open + kEnrollmentGap * static_cast<long>(i));
    sit_test(sp, ids[i], TrialPhase::FollowUp21, kFollowUp, "responses-followup", TestPhase::FollowUp21);
  }
  return out;
}

}  // namespace shieldup::sim
