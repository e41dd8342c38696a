// Copyright 2026 The facsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "facsim/common.hpp"
#include "facsim/rng.hpp"
#include "facsim/world.hpp"

namespace facsim {

enum class EventKind : std::uint8_t {
  // Initialization (day 0, before the first queue runs).
  InitAdmission,
  InitHospitalShortfall,
  InitInfection,
  InitRecovered,
  InitialCensus,
  VisitorsAssigned,
  VisitorAssigned,
  VisitorShortfall,
  // Daily.
  ExposureQuota,
  Case,
  BlockedExposure,
  ExposureShortfall,
  Admission,
  CapacityBreach,
  Recovery,
  Discharge,
  Visit,
  VisitBlocked,
  Attendance,
  Absence,
  Skipped,
  Census,
};

inline constexpr std::array<std::string_view, 22> kEventKindNames{
    "init_admission", "init_hospital_shortfall", "init_infection", "init_recovered",
    "initial_census", "visitors_assigned",       "visitor_assigned", "visitor_shortfall",
    "exposure_quota", "case",                    "blocked_exposure", "exposure_shortfall",
    "admission",      "capacity_breach",         "recovery",         "discharge",
    "visit",          "visit_blocked",           "attendance",       "absence",
    "skipped",        "census"};

inline std::string_view name_of(EventKind k) { return kEventKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (std::size_t i = 0; i < kEventKindNames.size(); ++i)
    if (kEventKindNames[i] == s) return static_cast<EventKind>(i);
  return std::nullopt;
}

/// One logged outcome. The meaning of the generic columns depends on kind:
///
///   case               code = reported (0/1), covid_state = assigned severity
///   exposure_quota     code = exposures to create, value = potential cases,
///                      value2 = forecast infections
///   admission          code = length of stay (days), value = discharge day
///   visit/_blocked     agent = visitor, subject = resident, code = failing
///                      barrier (0 for a visit), value = visitor index,
///                      subject_state = resident's state
///   attendance         value = hours credited, subject = HCW type index
///   absence            code = reason (see workforce.hpp), subject = HCW type
///   skipped            code = action kind
///   census             value = acute COVID census, value2 = ICU COVID census
///   visitor_assigned   subject = resident, code = visitor index, value = p
///   visitors_assigned  subject = resident, code = drawn count
struct Event {
  int day = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Case;
  AgentId agent = -1;
  FacilityId facility = kNoFacility;
  CountyId county = -1;
  int age_group = -1;
  int covid_state = 0;
  int vaccinated = -1;
  AgentId subject = -1;
  int subject_state = 0;
  std::int64_t code = 0;
  double value = 0.0;
  double value2 = 0.0;

  friend bool operator==(const Event&, const Event&) = default;
};

inline constexpr std::string_view kEventCsvHeader =
    "day,seq,kind,agent,facility,county,age_group,covid_state,vaccinated,subject,subject_state,code,"
    "value,value2";

/// Append-only log ordered by (day, seq).
class EventLog {
 public:
  /// Appends `e`, stamping the next execution index.
  const Event& append(Event e) {
    if (!entries_.empty() && e.day < entries_.back().day)
      throw std::logic_error("event day " + std::to_string(e.day) +
                             " precedes previously logged day " +
                             std::to_string(entries_.back().day));
    e.seq = next_seq_++;
    entries_.push_back(e);
    return entries_.back();
  }

  const std::vector<Event>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Event& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::size_t count(EventKind k) const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.kind == k;
    return n;
  }

  void write_csv(std::ostream& os) const {
    os << kEventCsvHeader << '\n';
    std::string line;
    for (const auto& e : entries_) {
      line.clear();
      line += std::to_string(e.day);
      line += ',';
      line += std::to_string(e.seq);
      line += ',';
      line += name_of(e.kind);
      line += ',';
      line += std::to_string(e.agent);
      line += ',';
      line += std::to_string(e.facility);
      line += ',';
      line += std::to_string(e.county);
      line += ',';
      line += std::to_string(e.age_group);
      line += ',';
      line += std::to_string(e.covid_state);
      line += ',';
      line += std::to_string(e.vaccinated);
      line += ',';
      line += std::to_string(e.subject);
      line += ',';
      line += std::to_string(e.subject_state);
      line += ',';
      line += std::to_string(e.code);
      line += ',';
      line += format_double(e.value);
      line += ',';
      line += format_double(e.value2);
      line += '\n';
      os << line;
    }
  }

  std::string to_csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
  }

  /// FNV-1a over the CSV bytes.
  std::uint64_t checksum() const { return fnv1a64(to_csv()); }

  static EventLog read_csv(std::istream& is);

 private:
  std::vector<Event> entries_;
  std::uint64_t next_seq_ = 0;
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = line.find(',', start);
    if (p == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, p - start));
    start = p + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

}  // namespace detail

inline EventLog EventLog::read_csv(std::istream& is) {
  EventLog log;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || line != kEventCsvHeader)
    throw ConfigError("event log: unexpected header");
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    auto fail = [&](const char* what) {
      throw ConfigError("event log line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 14) fail("expected 14 columns");
    Event e;
    auto kind = parse_event_kind(f[2]);
    if (!kind) fail("unknown event kind");
    e.kind = *kind;
    if (!detail::parse_number(f[0], e.day) || !detail::parse_number(f[1], e.seq) ||
        !detail::parse_number(f[3], e.agent) || !detail::parse_number(f[4], e.facility) ||
        !detail::parse_number(f[5], e.county) || !detail::parse_number(f[6], e.age_group) ||
        !detail::parse_number(f[7], e.covid_state) || !detail::parse_number(f[8], e.vaccinated) ||
        !detail::parse_number(f[9], e.subject) || !detail::parse_number(f[10], e.subject_state) ||
        !detail::parse_number(f[11], e.code) || !detail::parse_number(f[12], e.value) ||
        !detail::parse_number(f[13], e.value2))
      fail("malformed field");
    if (e.seq != log.next_seq_) fail("execution index out of sequence");
    log.append(e);
  }
  return log;
}

}  // namespace facsim
