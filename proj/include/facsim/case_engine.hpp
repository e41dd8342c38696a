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
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "facsim/common.hpp"
#include "facsim/event_log.hpp"
#include "facsim/rng.hpp"
#include "facsim/world.hpp"

namespace facsim {

/// Potential cases that must be drawn so that, after vaccine-immune agents
/// block their share, `infections` cases remain on average.
inline double inflate_to_exposures(double infections, double county_vacc_rate, double v_eff) {
  if (!(county_vacc_rate >= 0.0 && county_vacc_rate <= 1.0))
    throw ConfigError("county vaccination rate outside [0, 1]");
  if (!(v_eff >= 0.0 && v_eff <= 1.0)) throw ConfigError("vaccine effectiveness outside [0, 1]");
  const double denom = (1.0 - county_vacc_rate) + county_vacc_rate * (1.0 - v_eff);
  if (!(denom > 0.0))
    throw ConfigError("exposure inflation undefined: every agent vaccinated with full effectiveness");
  return infections / denom;
}

/// floor(x) plus a Bernoulli draw on the fractional part.
inline std::int64_t stochastic_round(double x, RngStream& rng) {
  if (!(x >= 0.0)) return 0;
  const double fl = std::floor(x);
  return static_cast<std::int64_t>(fl) + (rng.bernoulli(x - fl) ? 1 : 0);
}

/// Probabilities over {asymptomatic, mild, severe, critical}.
using SeverityRow = std::array<double, 4>;

inline constexpr std::array<CovidState, 4> kSeverityStates{
    CovidState::Asymptomatic, CovidState::Mild, CovidState::Severe, CovidState::Critical};

struct SeverityTable {
  double reported_fraction = 0.125;
  // [vaccinated][age]. Reported non-vaccinated rows for age groups 0 and 1
  // default to the published target proportions; age group 2 must be
  // configured.
  std::array<std::array<std::optional<SeverityRow>, kNumAgeGroups>, 2> reported{{
      {SeverityRow{0.050, 0.935, 0.012, 0.003}, SeverityRow{0.05, 0.904, 0.037, 0.009},
       std::nullopt},
      {SeverityRow{0.25, 0.65, 0.08, 0.02}, SeverityRow{0.25, 0.65, 0.08, 0.02},
       SeverityRow{0.25, 0.65, 0.08, 0.02}},
  }};
  // [vaccinated][age]. Never severe or critical.
  std::array<std::array<SeverityRow, kNumAgeGroups>, 2> nonreported{{
      {SeverityRow{0.25, 0.75, 0, 0}, SeverityRow{0.25, 0.75, 0, 0}, SeverityRow{0.25, 0.75, 0, 0}},
      {SeverityRow{0.5, 0.5, 0, 0}, SeverityRow{0.5, 0.5, 0, 0}, SeverityRow{0.5, 0.5, 0, 0}},
  }};

  const SeverityRow& row(bool vaccinated, bool is_reported, AgeGroup age) const {
    if (is_reported) {
      const auto& r = reported[vaccinated ? 1 : 0][index_of(age)];
      if (!r)
        throw ConfigError("no reported severity row for vaccinated=" + std::to_string(vaccinated) +
                          " age group " + std::to_string(index_of(age)));
      return *r;
    }
    return nonreported[vaccinated ? 1 : 0][index_of(age)];
  }

  void validate() const {
    if (!(reported_fraction >= 0.0 && reported_fraction <= 1.0))
      throw ConfigError("reported fraction outside [0, 1]");
    auto check = [](const SeverityRow& r, const std::string& what) {
      double sum = 0.0;
      for (double p : r) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(what + ": probability outside [0, 1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(what + ": row does not sum to 1");
    };
    for (int v = 0; v < 2; ++v)
      for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
        const std::string tag = "vaccinated=" + std::to_string(v) + " age=" + std::to_string(a);
        if (!reported[v][a]) throw ConfigError("reported severity row missing (" + tag + ")");
        check(*reported[v][a], "reported severity (" + tag + ")");
        const auto& nr = nonreported[v][a];
        check(nr, "nonreported severity (" + tag + ")");
        if (nr[2] != 0.0 || nr[3] != 0.0)
          throw ConfigError("nonreported severity (" + tag + ") must not be severe or critical");
      }
  }
};

/// Hospital length of stay: normal(mean, sd) truncated to [min, max], rounded
/// to whole days.
struct LosDistribution {
  double mean = 3.0;
  double sd = 5.0;
  int min = 1;
  int max = 50;

  void validate() const {
    if (!(sd > 0)) throw ConfigError("LOS sd must be positive");
    if (min < 1 || min > max) throw ConfigError("LOS bounds must satisfy 1 <= min <= max");
    const double a = (min - mean) / sd, b = (max - mean) / sd;
    const double mass = 0.5 * (std::erfc(-b / std::sqrt(2.0)) - std::erfc(-a / std::sqrt(2.0)));
    if (mass < 1e-4) throw ConfigError("LOS truncation interval holds too little probability mass");
  }

  int sample(RngStream& rng) const {
    for (;;) {
      const double x = rng.normal(mean, sd);
      if (x >= min && x <= max)
        return std::clamp(static_cast<int>(std::lround(x)), min, max);
    }
  }
};

struct CaseEngineParams {
  SeverityTable severity;
  LosDistribution los;
  // Age weights used to pick newly infected community agents.
  std::array<double, kNumAgeGroups> case_age_dist{0.70, 0.18, 0.12};
  int community_case_days = 7;
  double v_eff = 0.24;

  void validate() const {
    severity.validate();
    los.validate();
    if (community_case_days < 1) throw ConfigError("community case duration must be >= 1 day");
    if (!(v_eff >= 0.0 && v_eff <= 1.0)) throw ConfigError("v_eff outside [0, 1]");
    double s = 0.0;
    for (double w : case_age_dist) {
      if (!(w >= 0.0)) throw ConfigError("case age weights must be non-negative");
      s += w;
    }
    if (!(s > 0.0)) throw ConfigError("case age weights sum to zero");
  }
};

struct SeverityDraw {
  CovidState severity = CovidState::Asymptomatic;
  bool reported = false;
};

/// Reported status first, then severity from the (vaccination, reported,
/// age) row. `community_only` conditions the row on asymptomatic/mild.
inline SeverityDraw assign_severity(const Agent& agent, const SeverityTable& table, RngStream& rng,
                                    bool community_only = false) {
  SeverityDraw d;
  d.reported = rng.bernoulli(table.reported_fraction);
  SeverityRow row = table.row(agent.vaccinated, d.reported, agent.age);
  if (community_only) {
    row[2] = row[3] = 0.0;
    if (row[0] + row[1] <= 0.0) row[1] = 1.0;
  }
  const std::size_t k = rng.weighted_index(row);
  d.severity = kSeverityStates[k < 4 ? k : 1];
  return d;
}

inline Event agent_event(EventKind kind, int day, const Agent& a) {
  Event e;
  e.day = day;
  e.kind = kind;
  e.agent = a.id;
  e.county = a.county;
  e.age_group = static_cast<int>(index_of(a.age));
  e.covid_state = code_of(a.state);
  e.vaccinated = a.vaccinated ? 1 : 0;
  return e;
}

/// Hospital for a new admission: a hospital with a free bed of the needed
/// class, nearest to the agent's home county (most spare beds, then lowest id,
/// breaks ties). Falls back to the nearest hospital when all are full.
struct BedChoice {
  FacilityId hospital = kNoFacility;
  bool over_capacity = false;
};

inline BedChoice choose_hospital(const World& world, CountyId home, bool icu) {
  BedChoice best;
  double best_dist = std::numeric_limits<double>::infinity();
  int best_spare = -1;
  FacilityId nearest = kNoFacility;
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (const auto& f : world.facilities) {
    if (!f.is_hospital()) continue;
    const double d = county_distance_miles(world, home, f.county);
    if (d < nearest_dist) {
      nearest_dist = d;
      nearest = f.id;
    }
    const int spare = icu ? f.icu_beds - f.icu_occupied : f.acute_beds - f.acute_occupied;
    if (spare <= 0) continue;
    if (d < best_dist || (d == best_dist && spare > best_spare)) {
      best_dist = d;
      best_spare = spare;
      best.hospital = f.id;
    }
  }
  if (best.hospital == kNoFacility) {
    if (nearest == kNoFacility) throw ConfigError("world has no hospitals to admit to");
    best.hospital = nearest;
    best.over_capacity = true;
  }
  return best;
}

/// Put `agent` into a hospital bed of `facility`.
inline void occupy_bed(World& world, Agent& agent, FacilityId facility, bool icu) {
  Facility& h = world.facility(facility);
  world.susceptible.remove(agent);
  if (icu) {
    ++h.icu_occupied;
    agent.location = Location::icu(facility);
  } else {
    ++h.acute_occupied;
    agent.location = Location::acute(facility);
  }
}

/// Daily case machinery: exposures, severity, admissions and recoveries.
class CaseEngine {
 public:
  explicit CaseEngine(CaseEngineParams params) : params_(std::move(params)) { params_.validate(); }

  const CaseEngineParams& params() const { return params_; }

  /// One exposure in `county`: pick a susceptible community agent by age
  /// weight; vaccine-immune agents block it, everyone else becomes a case.
  /// Returns the new case's agent id, or nullopt when blocked or the pool is
  /// empty.
  std::optional<AgentId> expose(CountyId county, int day, World& world, EventLog& log,
                                RngStream& rng) {
    const auto picked = world.susceptible.sample(county, params_.case_age_dist, rng);
    if (!picked) {
      Event e;
      e.day = day;
      e.kind = EventKind::ExposureShortfall;
      e.county = county;
      log.append(e);
      return std::nullopt;
    }
    Agent& a = world.agent(*picked);
    if (a.vaccine_immune) {
      // Blocked agents stay susceptible but are not drawn again today.
      world.susceptible.remove(a);
      blocked_today_.push_back(a.id);
      log.append(agent_event(EventKind::BlockedExposure, day, a));
      return std::nullopt;
    }
    start_case(a, day, world, log, rng);
    return a.id;
  }

  /// `n_exposures` exposures in `county`; returns the number of cases.
  std::int64_t create_daily_cases(CountyId county, std::int64_t n_exposures, int day, World& world,
                                  EventLog& log, RngStream& rng) {
    std::int64_t cases = 0;
    for (std::int64_t i = 0; i < n_exposures; ++i)
      if (expose(county, day, world, log, rng)) ++cases;
    end_of_day(world);
    return cases;
  }

  /// Severity, reported status and the follow-on (recovery date or admission).
  void start_case(Agent& a, int day, World& world, EventLog& log, RngStream& rng) {
    const SeverityDraw draw = assign_severity(a, params_.severity, rng);
    world.susceptible.remove(a);
    a.state = draw.severity;
    a.reported = draw.reported;
    Event e = agent_event(EventKind::Case, day, a);
    e.code = draw.reported ? 1 : 0;
    log.append(e);
    if (is_community_case(draw.severity)) {
      a.recovery_day = day + params_.community_case_days;
    } else {
      hospitalize(a, draw.severity, day, world, log, rng);
    }
  }

  /// Admit to an acute (severe) or ICU (critical) bed for a sampled stay.
  void hospitalize(Agent& a, CovidState severity, int day, World& world, EventLog& log,
                   RngStream& rng) {
    if (!is_hospital_severity(severity))
      throw std::logic_error("hospitalize called for a non-hospital severity");
    const bool icu = severity == CovidState::Critical;
    const BedChoice bed = choose_hospital(world, a.county, icu);
    const int los = params_.los.sample(rng);
    a.state = severity;
    a.recovery_day.reset();
    a.discharge_day = day + los;
    occupy_bed(world, a, bed.hospital, icu);
    Event e = agent_event(EventKind::Admission, day, a);
    e.facility = bed.hospital;
    e.code = los;
    e.value = static_cast<double>(*a.discharge_day);
    log.append(e);
    if (bed.over_capacity) {
      Event b = agent_event(EventKind::CapacityBreach, day, a);
      b.facility = bed.hospital;
      const Facility& h = world.facility(bed.hospital);
      b.code = icu ? 1 : 0;
      b.value = icu ? h.icu_occupied : h.acute_occupied;
      b.value2 = icu ? h.icu_beds : h.acute_beds;
      log.append(b);
    }
  }

  /// Community cases whose recovery day is today recover; hospital stays
  /// ending today are discharged back to the agent's residence as
  /// recovered. Agents are processed in id order.
  void process_recoveries(World& world, int day, EventLog& log) {
    for (auto& a : world.agents) {
      if (!a.alive) continue;
      if (a.recovery_day && *a.recovery_day == day) {
        a.state = CovidState::Recovered;
        a.recovery_day.reset();
        log.append(agent_event(EventKind::Recovery, day, a));
      }
      if (a.discharge_day && *a.discharge_day == day) discharge(world, a, day, log);
    }
  }

  /// Return today's blocked agents to the susceptible pools.
  void end_of_day(World& world) {
    for (AgentId id : blocked_today_) {
      const Agent& a = world.agent(id);
      if (a.alive && a.location.in_community() && a.state == CovidState::Susceptible)
        world.susceptible.insert(a);
    }
    blocked_today_.clear();
  }

 private:
  static void discharge(World& world, Agent& a, int day, EventLog& log) {
    Facility& h = world.facility(a.location.facility);
    if (a.location.kind == LocationKind::HospitalIcu) --h.icu_occupied;
    else --h.acute_occupied;
    Event e = agent_event(EventKind::Discharge, day, a);
    e.facility = a.location.facility;
    e.code = a.location.kind == LocationKind::HospitalIcu ? 1 : 0;
    a.location = a.residence;
    a.state = CovidState::Recovered;
    a.discharge_day.reset();
    e.covid_state = code_of(a.state);
    log.append(e);
  }

  CaseEngineParams params_;
  std::vector<AgentId> blocked_today_;
};

/// COVID bed census (acute, ICU) measured from agent state.
inline std::pair<std::int64_t, std::int64_t> covid_census(const World& world) {
  std::int64_t acute = 0, icu = 0;
  for (const auto& a : world.agents) {
    if (!a.alive || !is_hospital_severity(a.state)) continue;
    if (a.location.kind == LocationKind::HospitalAcute) ++acute;
    else if (a.location.kind == LocationKind::HospitalIcu) ++icu;
  }
  return {acute, icu};
}

}  // namespace facsim
