#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>

#include "shieldup/content/parse.hpp"

namespace shieldup {

struct TacticInfo {
  Tactic id;
  std::string display_name;
  std::string forewarning;
  std::string refutation;

  bool operator==(const TacticInfo&) const = default;
};

// Shared inoculation content: one forewarning and one refutation per tactic,
// indexed by the Tactic enum.
class Taxonomy {
 public:
  static Taxonomy parse(std::string_view doc) {
    const json arr = detail::parse_json_document(doc);
    if (!arr.is_array()) throw Error(Errc::Schema, "<root>", "taxonomy must be a JSON array");
    if (arr.size() != kTacticNames.size()) {
      throw Error(Errc::Schema, "<root>", "taxonomy must list exactly 6 tactics");
    }
    Taxonomy t;
    std::set<Tactic> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      detail::FieldReader r(arr[i], "[" + std::to_string(i) + "]");
      r.require_keys({"id", "display_name", "forewarning", "refutation"});
      TacticInfo info{r.enumeration<Tactic>("id"), r.text("display_name", true),
                      r.text("forewarning", true), r.text("refutation", true)};
      if (!seen.insert(info.id).second) throw Error(Errc::Schema, r.at("id"), "duplicate tactic");
      t.entries_[static_cast<std::size_t>(info.id)] = std::move(info);
    }
    return t;
  }

  const TacticInfo& operator[](Tactic t) const { return entries_[static_cast<std::size_t>(t)]; }
  const std::array<TacticInfo, 6>& entries() const { return entries_; }

  json to_json() const {
    json arr = json::array();
    for (const auto& e : entries_) {
      arr.push_back({{"id", name_of(e.id)},
                     {"display_name", e.display_name},
                     {"forewarning", e.forewarning},
                     {"refutation", e.refutation}});
    }
    return arr;
  }

 private:
  std::array<TacticInfo, 6> entries_{};
};

}  // namespace shieldup
