#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/core/arm.hpp"
#include "shieldup/core/error.hpp"
#include "shieldup/core/random.hpp"
#include "shieldup/psychometrics/irt.hpp"
#include "shieldup/sdat/sdat.hpp"
#include "shieldup/trial/trial.hpp"

namespace shieldup::sim {

struct ArmEffect {
  double scam = 0.0;     // shift of scam theta at post
  double notscam = 0.0;  // shift of not-scam theta at post
  double dissipation = 1.0;  // fraction of the not-scam shift undone by follow-up
};

struct BankItem {
  std::string storyline_id;
  bool is_scam = true;
  IrtItemParams params;
};

struct DemographicsModel {
  double age_mean = 35.0;
  double age_sd = 12.0;
  int age_min = 18;
  int age_max = 80;
  std::vector<std::pair<std::string, double>> gender{{"female", 0.48}, {"male", 0.50}, {"nonbinary", 0.02}};
  std::vector<double> income_level{0.20, 0.30, 0.25, 0.15, 0.10};     // levels 1..k
  std::vector<double> education_level{0.10, 0.25, 0.35, 0.20, 0.10};  // levels 1..k
  double ability_age_correlation = 0.0;  // correlation of baseline thetas with age
};

struct CohortConfig {
  int n = 3000;
  std::uint64_t seed = 20240521;
  std::array<ArmEffect, 3> effects{};  // indexed by Arm
  double attrition_followup = 0.0;
  double factor_correlation = 0.0;  // between baseline scam and not-scam theta
  std::vector<BankItem> item_bank;  // one entry per storyline; forms A and B share parameters
  DemographicsModel demographics;
  TrialConfig trial;  // seed is ignored: the trial is seeded with `seed`
  int min_n = 30;

  const ArmEffect& effect(Arm arm) const { return effects[index_of(arm)]; }
  void validate() const;
};

// Default bank: five scam and five genuine storylines with moderate
// discrimination and difficulties spread around the population mean.
inline std::vector<BankItem> default_item_bank() {
  return {{"courier-customs", true, {1.4, -0.6}},  {"bank-kyc", true, {1.7, -0.2}},
          {"job-task", true, {1.2, 0.1}},          {"crypto-doubler", true, {1.5, 0.4}},
          {"relative-emergency", true, {1.3, -0.3}}, {"cashback-offer", false, {1.3, -0.5}},
          {"festival-sale", false, {1.5, -0.1}},   {"bank-alert", false, {1.2, 0.2}},
          {"delivery-update", false, {1.6, -0.3}}, {"upi-collect-refund", false, {1.4, 0.3}}};
}

// Injected pattern: ShieldUp lifts scam identification more than the general
// awareness arm, both active arms dip on genuine offers at post, and the dip
// is gone by follow-up.
inline CohortConfig default_cohort_config() {
  CohortConfig cfg;
  cfg.effects[index_of(Arm::ShieldUp)] = {0.8, -0.4, 1.0};
  cfg.effects[index_of(Arm::GeneralAwareness)] = {0.3, -0.3, 1.0};
  cfg.effects[index_of(Arm::ChromeDino)] = {0.0, 0.0, 1.0};
  cfg.item_bank = default_item_bank();
  cfg.attrition_followup = 0.05;
  return cfg;
}

inline void CohortConfig::validate() const {
  auto prob = [](double p, const std::string& field) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidConfig, field, "must be a probability in [0,1]");
  };
  auto weights = [](const auto& w, const std::string& field) {
    double total = 0.0;
    for (double v : w) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidConfig, field, "weights must be non-negative");
      total += v;
    }
    if (!(total > 0.0)) throw Error(Errc::InvalidConfig, field, "weights must not all be zero");
  };
  if (n < min_n) throw Error(Errc::InvalidConfig, "n", "at least " + std::to_string(min_n) + " participants");
  prob(attrition_followup, "attrition_followup");
  if (!(std::abs(factor_correlation) < 1.0)) throw Error(Errc::InvalidConfig, "factor_correlation", "must be in (-1,1)");
  for (Arm arm : kArms) {
    const ArmEffect& e = effect(arm);
    const std::string base = "effect_shift." + std::string(name_of(arm));
    if (!std::isfinite(e.scam) || !std::isfinite(e.notscam)) throw Error(Errc::InvalidConfig, base, "must be finite");
    prob(e.dissipation, "dissipation." + std::string(name_of(arm)));
  }
  int scam = 0;
  std::vector<std::string> ids;
  for (const auto& item : item_bank) {
    if (item.storyline_id.empty()) throw Error(Errc::InvalidConfig, "item_bank", "storyline_id required");
    if (!(item.params.a > 0.0) || !std::isfinite(item.params.a) || !std::isfinite(item.params.b)) {
      throw Error(Errc::InvalidConfig, "item_bank." + item.storyline_id, "a must be positive and b finite");
    }
    scam += item.is_scam ? 1 : 0;
    ids.push_back(item.storyline_id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error(Errc::InvalidConfig, "item_bank", "duplicate storyline_id");
  }
  if (static_cast<int>(item_bank.size()) != kSdatItems || scam != kSdatItems / 2) {
    throw Error(Errc::InvalidConfig, "item_bank", "needs 10 storylines, 5 scam and 5 not scam");
  }
  const auto& d = demographics;
  if (d.age_min < trial.min_age || d.age_max > trial.max_age || d.age_min > d.age_max || !(d.age_sd >= 0.0)) {
    throw Error(Errc::InvalidConfig, "demographics.age", "range must lie within the enrollment limits");
  }
  if (d.gender.empty()) throw Error(Errc::InvalidConfig, "demographics.gender", "at least one category");
  std::vector<double> gw;
  for (const auto& [name, w] : d.gender) {
    if (name.empty()) throw Error(Errc::InvalidConfig, "demographics.gender", "empty category name");
    gw.push_back(w);
  }
  weights(gw, "demographics.gender");
  weights(d.income_level, "demographics.income_level");
  weights(d.education_level, "demographics.education_level");
  if (static_cast<int>(d.income_level.size()) > trial.max_ordinal_level ||
      static_cast<int>(d.education_level.size()) > trial.max_ordinal_level) {
    throw Error(Errc::InvalidConfig, "demographics", "too many ordinal levels");
  }
  if (!(std::abs(d.ability_age_correlation) < 1.0)) {
    throw Error(Errc::InvalidConfig, "demographics.ability_age_correlation", "must be in (-1,1)");
  }
  trial.validate();
}

// Reads a cohort config. Absent keys keep the defaults of
// default_cohort_config(); unknown keys are rejected.
inline CohortConfig cohort_config_from_json(const nlohmann::json& j) {
  CohortConfig cfg = default_cohort_config();
  auto fail = [](const std::string& field, const std::string& why) { return Error(Errc::InvalidConfig, field, why); };
  if (!j.is_object()) throw fail("$", "config must be a JSON object");
  static const std::vector<std::string> known{"n",         "seed",          "effect_shift", "dissipation",
                                              "attrition_followup", "factor_correlation", "item_bank",
                                              "demographics_model", "block_size", "counterbalance_forms"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw fail(key, "unknown key");
  }
  try {
    if (j.contains("n")) cfg.n = j.at("n").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("attrition_followup")) cfg.attrition_followup = j.at("attrition_followup").get<double>();
    if (j.contains("factor_correlation")) cfg.factor_correlation = j.at("factor_correlation").get<double>();
    if (j.contains("block_size")) cfg.trial.block_size = j.at("block_size").get<int>();
    if (j.contains("counterbalance_forms")) cfg.trial.counterbalance_forms = j.at("counterbalance_forms").get<bool>();
    if (j.contains("effect_shift")) {
      for (const auto& [name, v] : j.at("effect_shift").items()) {
        auto arm = parse_arm(name);
        if (!arm) throw fail("effect_shift." + name, "unknown arm");
        auto& e = cfg.effects[index_of(*arm)];
        if (v.contains("scam")) e.scam = v.at("scam").get<double>();
        if (v.contains("notscam")) e.notscam = v.at("notscam").get<double>();
      }
    }
    if (j.contains("dissipation")) {
      for (const auto& [name, v] : j.at("dissipation").items()) {
        auto arm = parse_arm(name);
        if (!arm) throw fail("dissipation." + name, "unknown arm");
        cfg.effects[index_of(*arm)].dissipation = v.get<double>();
      }
    }
    if (j.contains("item_bank")) {
      cfg.item_bank.clear();
      for (const auto& it : j.at("item_bank")) {
        cfg.item_bank.push_back({it.at("storyline_id").get<std::string>(), it.at("is_scam").get<bool>(),
                                 {it.at("a").get<double>(), it.at("b").get<double>()}});
      }
    }
    if (j.contains("demographics_model")) {
      const auto& d = j.at("demographics_model");
      auto& m = cfg.demographics;
      if (d.contains("age_mean")) m.age_mean = d.at("age_mean").get<double>();
      if (d.contains("age_sd")) m.age_sd = d.at("age_sd").get<double>();
      if (d.contains("age_min")) m.age_min = d.at("age_min").get<int>();
      if (d.contains("age_max")) m.age_max = d.at("age_max").get<int>();
      if (d.contains("gender")) {
        m.gender.clear();
        for (const auto& [name, w] : d.at("gender").items()) m.gender.emplace_back(name, w.get<double>());
      }
      if (d.contains("income_level")) m.income_level = d.at("income_level").get<std::vector<double>>();
      if (d.contains("education_level")) m.education_level = d.at("education_level").get<std::vector<double>>();
      if (d.contains("ability_age_correlation")) {
        m.ability_age_correlation = d.at("ability_age_correlation").get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail("$", e.what());
  }

  cfg.validate();
  return cfg;
}

inline CohortConfig parse_cohort_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidConfig, "byte " + std::to_string(e.byte), e.what());
  }
  return cohort_config_from_json(j);
}

inline nlohmann::json to_json(const CohortConfig& cfg) {
  nlohmann::json shift = nlohmann::json::object(), dissipation = nlohmann::json::object();
  for (Arm arm : kArms) {
    const auto& e = cfg.effect(arm);
    shift[std::string(name_of(arm))] = {{"scam", e.scam}, {"notscam", e.notscam}};
    dissipation[std::string(name_of(arm))] = e.dissipation;
  }
  nlohmann::json bank = nlohmann::json::array();
  for (const auto& it : cfg.item_bank) {
    bank.push_back({{"storyline_id", it.storyline_id}, {"is_scam", it.is_scam}, {"a", it.params.a}, {"b", it.params.b}});
  }
  nlohmann::json gender = nlohmann::json::object();
  for (const auto& [name, w] : cfg.demographics.gender) gender[name] = w;
  const auto& d = cfg.demographics;
  return {{"n", cfg.n},
          {"seed", cfg.seed},
          {"effect_shift", shift},
          {"dissipation", dissipation},
          {"attrition_followup", cfg.attrition_followup},
          {"factor_correlation", cfg.factor_correlation},
          {"block_size", cfg.trial.block_size},
          {"counterbalance_forms", cfg.trial.counterbalance_forms},
          {"item_bank", bank},
          {"demographics_model",
           {{"age_mean", d.age_mean},
            {"age_sd", d.age_sd},
            {"age_min", d.age_min},
            {"age_max", d.age_max},
            {"gender", gender},
            {"income_level", d.income_level},
            {"education_level", d.education_level},
            {"ability_age_correlation", d.ability_age_correlation}}}};
}

enum PhaseIndex : std::size_t { kPre = 0, kPost = 1, kFollowUp = 2 };

struct SyntheticParticipant {
  std::uint64_t ordinal = 0;  // 1-based enrollment order
  Demographics demographics;
  Arm arm = Arm::ChromeDino;
  std::array<double, 3> theta_scam{};     // pre, post, follow-up
  std::array<double, 3> theta_notscam{};
  bool attrits = false;  // misses the follow-up

  bool operator==(const SyntheticParticipant&) const = default;
};

// Arms follow the same permuted blocks the trial module draws, so a cohort
// lines up with the assignments run_virtual_trial will receive.
inline std::vector<SyntheticParticipant> generate_cohort(const CohortConfig& cfg) {
  cfg.validate();
  std::vector<SyntheticParticipant> out;
  out.reserve(static_cast<std::size_t>(cfg.n));
  std::vector<Arm> block;
  const auto block_size = static_cast<std::uint64_t>(cfg.trial.block_size);
  const auto& dm = cfg.demographics;
  std::vector<double> gender_w;
  for (const auto& g : dm.gender) gender_w.push_back(g.second);

  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(cfg.n); ++i) {
    if (i % block_size == 0) block = randomization_block(cfg.seed, i / block_size, cfg.trial.block_size);
    SyntheticParticipant p;
    p.ordinal = i + 1;
    p.arm = block[i % block_size];

    RandomStream rng = RandomStream::derive(cfg.seed, p.ordinal, "cohort");
    const double z_age = rng.normal();
    const double age = std::round(dm.age_mean + dm.age_sd * z_age);
    p.demographics.age = static_cast<int>(std::clamp(age, double(dm.age_min), double(dm.age_max)));
    p.demographics.gender = dm.gender[rng.categorical(gender_w)].first;
    p.demographics.income_level = static_cast<int>(rng.categorical(dm.income_level)) + 1;
    p.demographics.education_level = static_cast<int>(rng.categorical(dm.education_level)) + 1;

    const double r_age = dm.ability_age_correlation;
    const double rho = cfg.factor_correlation;
    const double shared = rng.normal();
    const double e_scam = rng.normal();
    const double e_notscam = rng.normal();
    // Two unit-variance factors with correlation rho, then blended with age.
    const double f_scam = std::sqrt(std::abs(rho)) * shared + std::sqrt(1 - std::abs(rho)) * e_scam;
    const double f_notscam =
        (rho < 0 ? -1.0 : 1.0) * std::sqrt(std::abs(rho)) * shared + std::sqrt(1 - std::abs(rho)) * e_notscam;
    const double scale = std::sqrt(1 - r_age * r_age);
    const double pre_scam = r_age * z_age + scale * f_scam;
    const double pre_notscam = r_age * z_age + scale * f_notscam;

    const ArmEffect& e = cfg.effect(p.arm);
    p.theta_scam = {pre_scam, pre_scam + e.scam, pre_scam + e.scam};
    const double post_notscam = pre_notscam + e.notscam;
    p.theta_notscam = {pre_notscam, post_notscam, post_notscam + e.dissipation * (pre_notscam - post_notscam)};
    p.attrits = rng.bernoulli(cfg.attrition_followup);
    out.push_back(std::move(p));
  }
  return out;
}

// Synthetic SDAT items built from the bank: item id "<storyline>-<form>",
// identical parameters on both forms.
inline std::vector<SdatItem> bank_items(const CohortConfig& cfg) {
  std::vector<SdatItem> items;
  for (Form f : {Form::A, Form::B}) {
    for (const auto& b : cfg.item_bank) {
      SdatItem it;
      it.item_id = b.storyline_id + "-" + std::string(name_of(f));
      it.storyline_id = b.storyline_id;
      it.form = f;
      it.is_scam = b.is_scam;
      items.push_back(std::move(it));
    }
  }
  return items;
}

inline const BankItem& bank_entry(const CohortConfig& cfg, const std::string& storyline_id) {
  for (const auto& b : cfg.item_bank) {
    if (b.storyline_id == storyline_id) return b;
  }
  throw Error(Errc::UnknownItem, storyline_id);
}

namespace detail {

inline double logistic_noise(RandomStream& rng) {
  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  return std::log(u / (1.0 - u));
}

// Ordinal category 1..5 from a latent value with logistic noise.
inline int ordinal_bin(double latent, RandomStream& rng) {
  static constexpr std::array<double, 4> cuts{-1.5, -0.5, 0.5, 1.5};
  const double z = latent + logistic_noise(rng);
  int level = 1;
  for (double c : cuts) level += z > c ? 1 : 0;
  return level;
}

}  // namespace detail

// One response per item. Discernment is correct with the 2PL probability on
// the factor matching the item's class. Compliance falls with ability on scam
// items and rises with it on genuine ones; confidence rises with |theta - b|.
inline std::vector<SdatResponse> respond_2pl(double theta_scam, double theta_notscam,
                                             std::span<const std::pair<SdatItem, IrtItemParams>> items,
                                             RandomStream& rng) {
  std::vector<SdatResponse> out;
  out.reserve(items.size());
  for (const auto& [item, params] : items) {
    const double theta = item.is_scam ? theta_scam : theta_notscam;
    const bool right = rng.bernoulli(prob_2pl(params, theta));
    SdatResponse r;
    r.item_id = item.item_id;
    r.discernment = right == item.is_scam ? Discernment::Scam : Discernment::NotScam;
    const double margin = params.a * (theta - params.b);
    r.compliance = detail::ordinal_bin(item.is_scam ? -margin : margin, rng);
    r.confidence = detail::ordinal_bin(std::abs(margin) - 1.0, rng);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace shieldup::sim
