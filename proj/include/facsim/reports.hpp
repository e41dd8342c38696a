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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "facsim/case_engine.hpp"
#include "facsim/config.hpp"
#include "facsim/event_log.hpp"
#include "facsim/io.hpp"
#include "facsim/seirs.hpp"
#include "facsim/visitation.hpp"
#include "facsim/workforce.hpp"
#include "facsim/world.hpp"

namespace facsim {

// Reports are computed from the event log plus inputs and config only, so a
// saved log reproduces them.

struct Pattern1Row {
  CountyId county = 0;
  int day = 0;
  double expected = 0.0;  // forecast infections
  std::int64_t modeled = 0;  // cases created
  std::int64_t exposures = 0;
  std::int64_t blocked = 0;
  std::int64_t shortfall = 0;
  std::int64_t vaccinated_cases = 0;
};

inline std::vector<Pattern1Row> pattern1(const EventLog& log) {
  std::map<std::pair<CountyId, int>, Pattern1Row> rows;
  auto row = [&](CountyId c, int d) -> Pattern1Row& {
    auto& r = rows[{c, d}];
    r.county = c;
    r.day = d;
    return r;
  };
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::ExposureQuota: {
        auto& r = row(e.county, e.day);
        r.expected = e.value2;
        r.exposures = e.code;
        break;
      }
      case EventKind::Case: {
        auto& r = row(e.county, e.day);
        ++r.modeled;
        r.vaccinated_cases += e.vaccinated == 1;
        break;
      }
      case EventKind::BlockedExposure: ++row(e.county, e.day).blocked; break;
      case EventKind::ExposureShortfall: ++row(e.county, e.day).shortfall; break;
      default: break;
    }
  }
  std::vector<Pattern1Row> out;
  for (auto& [k, r] : rows) out.push_back(r);
  return out;
}

inline std::string pattern1_csv(const std::vector<Pattern1Row>& rows) {
  std::string s = "county,day,expected,modeled\n";
  for (const auto& r : rows)
    s += std::to_string(r.county) + "," + std::to_string(r.day) + "," + format_double(r.expected) + "," +
         std::to_string(r.modeled) + "\n";
  return s;
}

struct Pattern2Row {
  bool vaccinated = false;
  int age = 0;
  CovidState state = CovidState::Asymptomatic;
  std::int64_t modeled = 0;
  double proportion = 0.0;
  std::optional<double> target;
};

/// Reported daily cases by (vaccination, age, severity).
inline std::vector<Pattern2Row> pattern2(const EventLog& log, const SeverityTable& table) {
  std::array<std::array<std::array<std::int64_t, 4>, kNumAgeGroups>, 2> n{};
  for (const auto& e : log) {
    if (e.kind != EventKind::Case || e.code != 1) continue;
    if (e.age_group < 0 || e.age_group >= static_cast<int>(kNumAgeGroups) || e.covid_state < 2 || e.covid_state > 5)
      throw ConfigError("case event " + std::to_string(e.seq) + " has an invalid age group or state");
    ++n[e.vaccinated == 1][static_cast<std::size_t>(e.age_group)][static_cast<std::size_t>(e.covid_state - 2)];
  }
  std::vector<Pattern2Row> out;
  for (int v = 0; v < 2; ++v)
    for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
      std::int64_t total = 0;
      for (auto k : n[v][a]) total += k;
      const auto& row = table.reported[static_cast<std::size_t>(v)][a];
      for (std::size_t s = 0; s < 4; ++s) {
        Pattern2Row r;
        r.vaccinated = v == 1;
        r.age = static_cast<int>(a);
        r.state = kSeverityStates[s];
        r.modeled = n[v][a][s];
        r.proportion = total > 0 ? static_cast<double>(r.modeled) / static_cast<double>(total) : 0.0;
        if (row) r.target = (*row)[s];
        out.push_back(r);
      }
    }
  return out;
}

inline const char* state_name(CovidState s) {
  switch (s) {
    case CovidState::Susceptible: return "susceptible";
    case CovidState::Asymptomatic: return "asymptomatic";
    case CovidState::Mild: return "mild";
    case CovidState::Severe: return "severe";
    case CovidState::Critical: return "critical";
    case CovidState::Recovered: return "recovered";
  }
  return "?";
}

inline std::string pattern2_csv(const std::vector<Pattern2Row>& rows) {
  std::string s = "vaccination,age,covid_state,modeled_cases,modeled_proportion,target_proportion\n";
  for (const auto& r : rows)
    s += std::string(r.vaccinated ? "vaccinated" : "not_vaccinated") + "," + std::to_string(r.age) + "," +
         state_name(r.state) + "," + std::to_string(r.modeled) + "," + format_double(r.proportion) + "," +
         (r.target ? format_double(*r.target) : std::string()) + "\n";
  return s;
}

struct Pattern3Row {
  std::string metric;
  std::string index;
  double modeled = 0.0;
  double target = 0.0;
  std::int64_t n = 0;
};

/// Visitor-count shares, visitor age shares, and per-index daily rates.
/// selection_rate counts visitor-days that passed the daily draw;
/// visit_rate counts visitor-days that ended in a visit.
inline std::vector<Pattern3Row> pattern3(const EventLog& log, const VisitationParams& params) {
  std::array<std::int64_t, kMaxVisitors + 1> counts{};
  std::int64_t residents = 0;
  std::array<std::array<std::int64_t, kNumAgeGroups>, kMaxVisitors> ages{};
  std::array<std::int64_t, kMaxVisitors> assigned{}, days{}, selected{}, visits{};
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::VisitorsAssigned:
        ++residents;
        ++counts[static_cast<std::size_t>(std::clamp<std::int64_t>(e.code, 0, kMaxVisitors))];
        break;
      case EventKind::VisitorAssigned: {
        const auto k = static_cast<std::size_t>(e.code - 1);
        if (k < kMaxVisitors && e.age_group >= 0) {
          ++assigned[k];
          ++ages[k][static_cast<std::size_t>(e.age_group)];
        }
        break;
      }
      case EventKind::Visit:
      case EventKind::VisitBlocked: {
        const auto k = static_cast<std::size_t>(e.value) - 1;
        if (k >= kMaxVisitors) break;
        ++days[k];
        selected[k] += e.code != 1;
        visits[k] += e.code == 0;
        break;
      }
      default: break;
    }
  }
  std::vector<Pattern3Row> out;
  auto frac = [](std::int64_t a, std::int64_t b) { return b > 0 ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  for (std::size_t k = 0; k <= kMaxVisitors; ++k)
    out.push_back({"count_share", std::to_string(k), frac(counts[k], residents), params.count_probs[k], residents});
  for (std::size_t k = 0; k < kMaxVisitors; ++k)
    for (std::size_t a = 0; a < kNumAgeGroups; ++a)
      out.push_back({"age_share", std::to_string(k + 1) + ":" + std::to_string(a), frac(ages[k][a], assigned[k]),
                     params.age_dists[k][a], assigned[k]});
  for (std::size_t k = 0; k < kMaxVisitors; ++k)
    out.push_back({"selection_rate", std::to_string(k + 1), frac(selected[k], days[k]), params.daily_probs[k], days[k]});
  for (std::size_t k = 0; k < kMaxVisitors; ++k)
    out.push_back({"visit_rate", std::to_string(k + 1), frac(visits[k], days[k]), params.daily_probs[k], days[k]});
  std::int64_t total_days = 0, total_visits = 0;
  double expected = 0.0;
  for (std::size_t k = 0; k < kMaxVisitors; ++k) {
    total_days += days[k];
    total_visits += visits[k];
    expected += static_cast<double>(days[k]) * params.daily_probs[k];
  }
  out.push_back({"total_visits", "all", static_cast<double>(total_visits), expected, total_days});
  return out;
}

inline std::string pattern3_csv(const std::vector<Pattern3Row>& rows) {
  std::string s = "metric,index,modeled,target,n\n";
  for (const auto& r : rows)
    s += r.metric + "," + r.index + "," + format_double(r.modeled) + "," + format_double(r.target) + "," +
         std::to_string(r.n) + "\n";
  return s;
}

/// Number of simulated days in the log (one census per day).
inline int simulated_days(const EventLog& log) { return static_cast<int>(log.count(EventKind::Census)); }

inline Pattern4Summary pattern4(const EventLog& log, const Inputs& in) {
  std::vector<double> hours(in.world.facilities.size(), 0.0);
  for (const auto& e : log)
    if (e.kind == EventKind::Attendance && e.facility >= 0 && static_cast<std::size_t>(e.facility) < hours.size())
      hours[static_cast<std::size_t>(e.facility)] += e.value;
  return pattern4_report(hours, std::max(1, simulated_days(log)), in.pbj);
}

inline std::string pattern4_csv(const Pattern4Summary& p) {
  std::string s = "facility,county,target_hours,simulated_hours,ratio,note\n";
  for (const auto& r : p.rows)
    s += std::to_string(r.facility) + "," + std::to_string(r.county) + "," + format_double(r.target_hours) + "," +
         format_double(r.simulated_hours) + "," + (r.ratio ? format_double(*r.ratio) : std::string()) + "," +
         (r.ratio ? "" : "excluded: zero target hours") + "\n";
  s += "mean,,,," + format_double(p.mean_ratio) + ",facilities=" + std::to_string(p.included) + "\n";
  s += "std,,,," + format_double(p.std_ratio) + ",\n";
  return s;
}

// ---------------------------------------------------------------- checks

enum class CheckStatus { Pass, Fail, Skip };

inline const char* name_of(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

struct Check {
  std::string pattern;
  std::string name;
  CheckStatus status = CheckStatus::Skip;
  std::string detail;
};

/// |x - n p| <= k sqrt(n p (1 - p)); degenerate p requires equality.
inline bool within_binomial(std::int64_t x, std::int64_t n, double p, double k) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  return std::abs(static_cast<double>(x) - mean) <= k * sd + 1e-9;
}

inline std::vector<Check> check_pattern1(const EventLog& log, const RunConfig& cfg) {
  std::vector<Check> out;
  const auto rows = pattern1(log);
  std::map<CountyId, std::vector<const Pattern1Row*>> by_county;
  for (const auto& r : rows) by_county[r.county].push_back(&r);
  const double v_eff = cfg.cases.v_eff;
  for (const auto& [c, rs] : by_county) {
    Check ch{"pattern1", "county " + std::to_string(c), CheckStatus::Pass, ""};
    std::int64_t blocked = 0, vcases = 0;
    for (const auto* r : rs) {
      if (r->exposures != r->modeled + r->blocked + r->shortfall) {
        ch.status = CheckStatus::Fail;
        ch.detail = "day " + std::to_string(r->day) + ": exposures do not add up";
        break;
      }
      if (v_eff == 0.0 && (r->modeled != r->exposures || std::abs(static_cast<double>(r->modeled) - r->expected) >= 1.0)) {
        ch.status = CheckStatus::Fail;
        ch.detail = "day " + std::to_string(r->day) + ": " + std::to_string(r->modeled) +
                    " cases vs forecast " + format_double(r->expected);
        break;
      }
      blocked += r->blocked;
      vcases += r->vaccinated_cases;
    }
    if (ch.status == CheckStatus::Pass) {
      if (v_eff == 0.0) {
        ch.detail = "cases equal the rounded forecast every day";
      } else {
        const std::int64_t vsel = blocked + vcases;
        const bool ok = within_binomial(blocked, vsel, v_eff, cfg.validation.sigma_bound);
        ch.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
        char buf[160];
        std::snprintf(buf, sizeof buf, "blocked %lld of %lld vaccinated selections, expected %.1f +- %.1f",
                      static_cast<long long>(blocked), static_cast<long long>(vsel), static_cast<double>(vsel) * v_eff,
                      cfg.validation.sigma_bound * std::sqrt(static_cast<double>(vsel) * v_eff * (1.0 - v_eff)));
        ch.detail = buf;
      }
    }
    out.push_back(ch);
  }
  return out;
}

inline std::vector<Check> check_pattern2(const EventLog& log, const RunConfig& cfg) {
  std::vector<Check> out;
  const auto& tol = cfg.validation;
  const auto rows = pattern2(log, cfg.cases.severity);
  for (std::size_t b = 0; b < rows.size(); b += 4) {
    std::int64_t n = 0;
    for (std::size_t s = 0; s < 4; ++s) n += rows[b + s].modeled;
    Check ch{"pattern2", std::string(rows[b].vaccinated ? "vaccinated" : "not_vaccinated") + " age " +
                             std::to_string(rows[b].age),
             CheckStatus::Skip, ""};
    if (!rows[b].target) {
      ch.detail = "no target row";
    } else if (n < tol.severity_min_cases) {
      ch.detail = std::to_string(n) + " reported cases < " + std::to_string(tol.severity_min_cases);
    } else {
      double worst = 0.0;
      for (std::size_t s = 0; s < 4; ++s) worst = std::max(worst, std::abs(rows[b + s].proportion - *rows[b + s].target));
      ch.status = worst <= tol.severity_abs_tol ? CheckStatus::Pass : CheckStatus::Fail;
      ch.detail = "max deviation " + format_double(worst) + " over " + std::to_string(n) + " cases";
    }
    out.push_back(ch);
  }
  std::int64_t total = 0, reported = 0;
  for (const auto& e : log)
    if (e.kind == EventKind::Case) {
      ++total;
      reported += e.code == 1;
    }
  Check ch{"pattern2", "reported fraction", CheckStatus::Skip, ""};
  if (total < tol.reported_min_cases) {
    ch.detail = std::to_string(total) + " cases < " + std::to_string(tol.reported_min_cases);
  } else {
    const double f = static_cast<double>(reported) / static_cast<double>(total);
    ch.status = std::abs(f - cfg.cases.severity.reported_fraction) <= tol.reported_fraction_tol ? CheckStatus::Pass
                                                                                                : CheckStatus::Fail;
    ch.detail = format_double(f) + " over " + std::to_string(total) + " cases";
  }
  out.push_back(ch);
  return out;
}

inline std::vector<Check> check_pattern3(const EventLog& log, const RunConfig& cfg) {
  std::vector<Check> out;
  const auto& tol = cfg.validation;
  const auto rows = pattern3(log, cfg.visitation);
  {
    Check ch{"pattern3", "visitor count shares", CheckStatus::Skip, ""};
    const std::int64_t n = rows.front().n;
    if (n < tol.visitor_share_min_residents) {
      ch.detail = std::to_string(n) + " residents < " + std::to_string(tol.visitor_share_min_residents);
    } else {
      double worst = 0.0;
      for (const auto& r : rows)
        if (r.metric == "count_share") worst = std::max(worst, std::abs(r.modeled - r.target));
      ch.status = worst <= tol.visitor_share_tol ? CheckStatus::Pass : CheckStatus::Fail;
      ch.detail = "max deviation " + format_double(worst) + " over " + std::to_string(n) + " residents";
    }
    out.push_back(ch);
  }
  for (const auto& r : rows) {
    if (r.metric != "selection_rate") continue;
    Check ch{"pattern3", "daily rate visitor " + r.index, CheckStatus::Skip, ""};
    if (!cfg.visit_policy.enabled) ch.detail = "visitation disabled";
    else if (r.n == 0) ch.detail = "no visitor-days";
    else {
      const auto x = static_cast<std::int64_t>(std::llround(r.modeled * static_cast<double>(r.n)));
      ch.status = within_binomial(x, r.n, r.target, tol.sigma_bound) ? CheckStatus::Pass : CheckStatus::Fail;
      ch.detail = format_double(r.modeled) + " over " + std::to_string(r.n) + " visitor-days";
    }
    out.push_back(ch);
  }
  return out;
}

inline std::vector<Check> check_pattern4(const EventLog& log, const Inputs& in, const RunConfig& cfg) {
  const auto& tol = cfg.validation;
  const auto p = pattern4(log, in);
  Check ch{"pattern4", "hours ratio", CheckStatus::Skip, ""};
  if (p.included == 0 || simulated_days(log) == 0) {
    ch.detail = "no facilities with target hours";
  } else {
    const bool ok = p.mean_ratio >= tol.pattern4_mean_min && p.mean_ratio <= tol.pattern4_mean_max &&
                    p.std_ratio <= tol.pattern4_std_max;
    ch.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    ch.detail = "mean " + format_double(p.mean_ratio) + ", std " + format_double(p.std_ratio) + " over " +
                std::to_string(p.included) + " facilities";
  }
  return {ch};
}

/// Census against admissions and discharges, and reported-only admissions.
inline std::vector<Check> check_ledger(const EventLog& log, const RunConfig& cfg, double scale_factor) {
  std::vector<Check> out;
  const auto init = cfg.hospital_init.scaled(scale_factor);
  std::int64_t init_acute = 0, init_icu = 0, shortfall_acute = 0, shortfall_icu = 0;
  std::optional<std::pair<double, double>> initial;
  std::int64_t acute = 0, icu = 0;
  std::map<AgentId, bool> reported;
  std::int64_t bad_admissions = 0, census_mismatch = 0;
  std::string first_mismatch;
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::InitAdmission: (e.covid_state == 5 ? init_icu : init_acute)++; break;
      case EventKind::InitHospitalShortfall: (e.covid_state == 5 ? shortfall_icu : shortfall_acute) += e.code; break;
      case EventKind::InitialCensus:
        initial = {e.value, e.value2};
        acute = init_acute;
        icu = init_icu;
        break;
      case EventKind::Case: reported[e.agent] = e.code == 1; break;
      case EventKind::Admission: {
        (e.covid_state == 5 ? icu : acute)++;
        auto it = reported.find(e.agent);
        if (it == reported.end() || !it->second) ++bad_admissions;
        break;
      }
      case EventKind::Discharge: (e.code == 1 ? icu : acute)--; break;
      case EventKind::Census:
        if (static_cast<double>(acute) != e.value || static_cast<double>(icu) != e.value2) {
          if (census_mismatch++ == 0) first_mismatch = "day " + std::to_string(e.day);
        }
        break;
      default: break;
    }
  }
  {
    Check ch{"ledger", "day-0 census", CheckStatus::Fail, ""};
    if (initial) {
      const bool ok = initial->first == static_cast<double>(init_acute) &&
                      initial->second == static_cast<double>(init_icu) &&
                      init_acute + shortfall_acute == init.severe_count &&
                      init_icu + shortfall_icu == init.critical_count;
      ch.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
      ch.detail = "acute " + format_double(initial->first) + "/" + std::to_string(init.severe_count) + ", icu " +
                  format_double(initial->second) + "/" + std::to_string(init.critical_count);
      if (shortfall_acute + shortfall_icu > 0) ch.detail += " (clipped to capacity)";
    } else {
      ch.detail = "no initial census event";
    }
    out.push_back(ch);
  }
  out.push_back({"ledger", "census = admissions - discharges",
                 census_mismatch == 0 ? CheckStatus::Pass : CheckStatus::Fail,
                 census_mismatch == 0 ? "all days" : std::to_string(census_mismatch) + " days differ, first " + first_mismatch});
  out.push_back({"ledger", "only reported cases hospitalized", bad_admissions == 0 ? CheckStatus::Pass : CheckStatus::Fail,
                 std::to_string(bad_admissions) + " violations"});
  return out;
}

inline std::vector<Check> validate_run(const EventLog& log, const Inputs& in, const RunConfig& cfg) {
  std::vector<Check> out;
  for (auto&& part : {check_pattern1(log, cfg), check_pattern2(log, cfg), check_pattern3(log, cfg),
                      check_pattern4(log, in, cfg), check_ledger(log, cfg, in.world.scale_factor)})
    out.insert(out.end(), part.begin(), part.end());
  return out;
}

inline bool all_passed(const std::vector<Check>& checks) {
  return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::Fail; });
}

inline std::string check_table(const std::vector<Check>& checks) {
  std::string s;
  for (const auto& c : checks) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4s  %-9s %-34s ", name_of(c.status), c.pattern.c_str(), c.name.c_str());
    s += buf + c.detail + "\n";
  }
  return s;
}

// ---------------------------------------------------------------- tables

inline std::string forecast_csv(const std::vector<CountyForecast>& fs) {
  std::string s = "county,day,estimated_infections\n";
  for (const auto& f : fs)
    for (std::size_t d = 0; d < f.infections.size(); ++d)
      s += std::to_string(f.county) + "," + std::to_string(d) + "," + format_double(f.infections[d]) + "\n";
  return s;
}

inline std::string hcw_assignments_csv(const std::vector<HcwAssignment>& hcws) {
  std::string s = "agent,hcw_type,home_county,primary,secondary\n";
  for (const auto& h : hcws) {
    std::string sec;
    for (FacilityId f : h.secondary) sec += (sec.empty() ? "" : ";") + std::to_string(f);
    s += std::to_string(h.agent) + "," + name_of(h.type) + "," + std::to_string(h.home_county) + "," +
         (h.primary == kNoFacility ? std::string() : std::to_string(h.primary)) + "," + sec + "\n";
  }
  return s;
}

inline std::string attendance_csv(const EventLog& log) {
  std::string s = "day,agent,hcw_type,facility,covid_state,hours,absence_reason\n";
  for (const auto& e : log) {
    if (e.kind != EventKind::Attendance && e.kind != EventKind::Absence) continue;
    const bool att = e.kind == EventKind::Attendance;
    s += std::to_string(e.day) + "," + std::to_string(e.agent) + "," + name_of(kHcwTypes[static_cast<std::size_t>(e.subject)]) +
         "," + (att ? std::to_string(e.facility) : std::string()) + "," + std::to_string(e.covid_state) + "," +
         format_double(att ? e.value : 0.0) + "," + (att ? std::string() : std::to_string(e.code)) + "\n";
  }
  return s;
}

inline std::string visits_csv(const EventLog& log) {
  std::string s = "day,resident,facility,visitor,visitor_index,visitor_state,resident_state,visitor_vaccinated,barrier\n";
  for (const auto& e : log) {
    if (e.kind != EventKind::Visit && e.kind != EventKind::VisitBlocked) continue;
    s += std::to_string(e.day) + "," + std::to_string(e.subject) + "," + std::to_string(e.facility) + "," +
         std::to_string(e.agent) + "," + format_double(e.value) + "," + std::to_string(e.covid_state) + "," +
         std::to_string(e.subject_state) + "," + std::to_string(e.vaccinated) + "," + std::to_string(e.code) + "\n";
  }
  return s;
}

/// Line chart of expected vs modeled daily cases for one county.
inline std::string pattern1_svg(const std::string& title, const std::vector<Pattern1Row>& rows) {
  constexpr double W = 640, H = 360, L = 56, R = 16, T = 36, B = 40;
  double ymax = 1.0;
  int days = 1;
  for (const auto& r : rows) {
    ymax = std::max({ymax, r.expected, static_cast<double>(r.modeled)});
    days = std::max(days, r.day + 1);
  }
  ymax *= 1.1;
  auto x = [&](int d) { return L + (W - L - R) * (days > 1 ? static_cast<double>(d) / (days - 1) : 0.5); };
  auto y = [&](double v) { return H - B - (H - T - B) * v / ymax; };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.1f", v);
    return std::string(b);
  };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\" font-family=\"sans-serif\" "
                  "font-size=\"11\">\n<rect width=\"640\" height=\"360\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(L) + "\" y=\"20\" font-size=\"14\">" + title + "</text>\n";
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(H - B) + "\" x2=\"" + num(W - R) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = ymax * k / 4.0;
    s += "<text x=\"" + num(L - 6) + "\" y=\"" + num(y(v) + 4) + "\" text-anchor=\"end\">" + num(v) + "</text>\n";
  }
  s += "<text x=\"" + num((L + W - R) / 2) + "\" y=\"" + num(H - 8) + "\" text-anchor=\"middle\">day</text>\n";
  auto line = [&](auto value, const char* color) {
    std::string pts;
    for (const auto& r : rows) pts += num(x(r.day)) + "," + num(y(value(r))) + " ";
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
  };
  s += line([](const Pattern1Row& r) { return r.expected; }, "#1f77b4");
  s += line([](const Pattern1Row& r) { return static_cast<double>(r.modeled); }, "#ff7f0e");
  s += "<text x=\"" + num(W - R - 150) + "\" y=\"20\" fill=\"#1f77b4\">forecast infections</text>\n";
  s += "<text x=\"" + num(W - R - 150) + "\" y=\"32\" fill=\"#ff7f0e\">modeled cases</text>\n";
  s += "</svg>\n";
  return s;
}

inline json run_summary(const EventLog& log, const RunConfig& cfg, const std::vector<Check>& checks) {
  json j;
  j["seed"] = cfg.seed;
  j["start_date"] = cfg.start_date.iso();
  j["horizon"] = cfg.horizon;
  j["days_simulated"] = simulated_days(log);
  j["events"] = log.size();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(log.checksum()));
  j["event_log_checksum"] = hex;
  json counts = json::object();
  for (std::size_t k = 0; k < kEventKindNames.size(); ++k)
    counts[std::string(kEventKindNames[k])] = log.count(static_cast<EventKind>(k));
  j["event_counts"] = counts;
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"pattern", c.pattern}, {"name", c.name}, {"status", name_of(c.status)}, {"detail", c.detail}});
  j["checks"] = cs;
  j["passed"] = all_passed(checks);
  return j;
}

/// Pattern tables, charts and summary.json under `dir`.
inline std::vector<Check> write_reports(const std::filesystem::path& dir, const EventLog& log, const Inputs& in,
                                        const RunConfig& cfg) {
  const auto p1 = pattern1(log);
  write_text_file(dir / "pattern1.csv", pattern1_csv(p1));
  write_text_file(dir / "pattern2.csv", pattern2_csv(pattern2(log, cfg.cases.severity)));
  write_text_file(dir / "pattern3.csv", pattern3_csv(pattern3(log, cfg.visitation)));
  write_text_file(dir / "pattern4.csv", pattern4_csv(pattern4(log, in)));
  write_text_file(dir / "attendance.csv", attendance_csv(log));
  write_text_file(dir / "visits.csv", visits_csv(log));
  for (const auto& c : in.world.counties) {
    std::vector<Pattern1Row> rows;
    for (const auto& r : p1)
      if (r.county == c.id) rows.push_back(r);
    write_text_file(dir / ("pattern1_county" + std::to_string(c.id) + ".svg"), pattern1_svg(c.name, rows));
  }
  const auto checks = validate_run(log, in, cfg);
  write_text_file(dir / "summary.json", run_summary(log, cfg, checks).dump(2) + "\n");
  return checks;
}

}  // namespace facsim
