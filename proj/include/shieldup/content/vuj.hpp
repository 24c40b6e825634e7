#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shieldup/content/parse.hpp"

namespace shieldup {

// One victim-user-journey story summary from the research corpus.
struct VujRecord {
  ScamType scam_type = ScamType::OtherUpi;
  SourceKind source_kind = SourceKind::News;
  std::map<Phase, std::string> phases;
  std::set<Tactic> tactics;
  std::set<Vulnerability> vulnerabilities;
  std::vector<std::string> emotions;

  bool operator==(const VujRecord&) const = default;
};

inline VujRecord vuj_from_json(const json& obj, const std::string& path) {
  detail::FieldReader r(obj, path);
  r.require_keys({"scam_type", "source_kind", "phases", "tactics", "vulnerabilities", "emotions"});
  VujRecord rec;
  rec.scam_type = r.enumeration<ScamType>("scam_type");
  rec.source_kind = r.enumeration<SourceKind>("source_kind");
  detail::FieldReader phases(r.object("phases"), r.at("phases"));
  phases.require_keys({"Hook", "Interaction", "Closure"});
  for (Phase p : all_values<Phase>()) rec.phases[p] = phases.text(name_of(p), true);
  rec.tactics = detail::enum_set<Tactic>(r.array("tactics"), r.at("tactics"));
  rec.vulnerabilities = detail::enum_set<Vulnerability>(r.array("vulnerabilities"), r.at("vulnerabilities"));
  for (const auto& e : r.array("emotions")) {
    if (!e.is_string()) throw Error(Errc::Schema, r.at("emotions"), "expected strings");
    rec.emotions.push_back(e.get<std::string>());
  }
  return rec;
}

inline json to_json(const VujRecord& rec) {
  json phases = json::object();
  for (const auto& [p, text] : rec.phases) phases[std::string(name_of(p))] = text;
  return {{"scam_type", name_of(rec.scam_type)},
          {"source_kind", name_of(rec.source_kind)},
          {"phases", phases},
          {"tactics", detail::enum_array(rec.tactics)},
          {"vulnerabilities", detail::enum_array(rec.vulnerabilities)},
          {"emotions", rec.emotions}};
}

// JSON lines, one record per line; blank lines are skipped.
inline std::vector<VujRecord> parse_vuj_lines(std::string_view text) {
  std::vector<VujRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::Syntax, where, e.what());
    }
    out.push_back(vuj_from_json(obj, where));
  }
  return out;
}

}  // namespace shieldup
