#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <string_view>

#include "shieldup/core/error.hpp"

namespace shieldup {

using Timestamp = std::chrono::sys_seconds;
using Clock = std::function<Timestamp()>;

inline Timestamp system_now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

// RFC 3339 in UTC with a literal Z, second resolution.
inline std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()),
                static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

inline Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  const std::string owned(text);
  if (std::sscanf(owned.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d, &h, &mi, &s,
                  &tail) != 7 ||
      tail != 'Z' || owned.size() != 20) {
    throw Error(Errc::Schema, "timestamp", "expected YYYY-MM-DDThh:mm:ssZ, got '" + owned + "'");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw Error(Errc::Schema, "timestamp", "out of range: '" + owned + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

// Manually advanced clock for simulated trials and tests.
class ManualClock {
 public:
  explicit ManualClock(Timestamp start) : now_(start) {}
  Timestamp now() const { return now_; }
  void advance(std::chrono::seconds by) { now_ += by; }
  void set(Timestamp t) { now_ = t; }
  Clock as_clock() {
    return [this] { return now_; };
  }

 private:
  Timestamp now_;
};

}  // namespace shieldup
