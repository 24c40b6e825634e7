#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/core/error.hpp"
#include "shieldup/core/time.hpp"

namespace shieldup {

struct Event {
  std::uint64_t seq = 0;
  Timestamp ts{};
  std::string participant_id;
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const Event&) const = default;
};

inline nlohmann::json to_json(const Event& e) {
  // Key order is fixed by nlohmann's sorted object map.
  return {{"seq", e.seq},
          {"ts", format_rfc3339(e.ts)},
          {"participant_id", e.participant_id},
          {"kind", e.kind},
          {"payload", e.payload}};
}

inline Event event_from_json(const nlohmann::json& j) {
  try {
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.ts = parse_rfc3339(j.at("ts").get<std::string>());
    e.participant_id = j.at("participant_id").get<std::string>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.at("payload");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::CorruptLog, "event", ex.what());
  } catch (const Error& ex) {
    throw Error(Errc::CorruptLog, "event", ex.what());
  }
}

// Append-only, strictly increasing sequence numbers. When backed by a file,
// each append is written as one JSON line and flushed before returning.
// Not internally synchronized: callers funnel writes through one appender.
class EventLog {
 public:
  EventLog() = default;

  static EventLog parse_jsonl(std::string_view text) {
    EventLog log;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::CorruptLog, "line " + std::to_string(lineno), e.what());
      }
      Event e = event_from_json(j);
      if (e.seq != log.next_seq()) {
        throw Error(Errc::CorruptLog, "line " + std::to_string(lineno),
                    "expected sequence number " + std::to_string(log.next_seq()));
      }
      log.events_.push_back(std::move(e));
    }
    return log;
  }

  // Loads `path` if it exists and appends subsequent events to it.
  static EventLog open(const std::filesystem::path& path) {
    EventLog log;
    if (std::filesystem::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      log = parse_jsonl(ss.str());
    }
    log.file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
    if (!*log.file_) throw Error(Errc::Io, path.string(), "cannot open event log for append");
    return log;
  }

  const Event& append(Timestamp ts, std::string participant_id, std::string kind, nlohmann::json payload) {
    Event e{next_seq(), ts, std::move(participant_id), std::move(kind), std::move(payload)};
    if (file_) {
      *file_ << to_json(e).dump() << '\n';
      file_->flush();
      if (!*file_) throw Error(Errc::Io, "event log", "append failed");
    }
    events_.push_back(std::move(e));
    return events_.back();
  }

  std::uint64_t next_seq() const { return events_.empty() ? 1 : events_.back().seq + 1; }
  std::uint64_t last_seq() const { return events_.empty() ? 0 : events_.back().seq; }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  std::string to_jsonl() const {
    std::string out;
    for (const auto& e : events_) out += to_json(e).dump() + "\n";
    return out;
  }

 private:
  std::vector<Event> events_;
  std::unique_ptr<std::ofstream> file_;
};

}  // namespace shieldup
