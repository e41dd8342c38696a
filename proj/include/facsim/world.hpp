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
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "facsim/common.hpp"
#include "facsim/rng.hpp"

namespace facsim {

using AgentId = std::int64_t;
using FacilityId = std::int32_t;
using CountyId = std::int32_t;

inline constexpr FacilityId kNoFacility = -1;

/// Integer codes 1..6 match the agent state table of the model description.
enum class CovidState : std::uint8_t {
  Susceptible = 1,
  Asymptomatic = 2,
  Mild = 3,
  Severe = 4,
  Critical = 5,
  Recovered = 6,
};

inline constexpr int code_of(CovidState s) { return static_cast<int>(s); }

inline constexpr bool is_hospital_severity(CovidState s) {
  return s == CovidState::Severe || s == CovidState::Critical;
}

inline constexpr bool is_community_case(CovidState s) {
  return s == CovidState::Asymptomatic || s == CovidState::Mild;
}

enum class LocationKind : std::uint8_t { Community, NursingHome, HospitalAcute, HospitalIcu };

struct Location {
  LocationKind kind = LocationKind::Community;
  FacilityId facility = kNoFacility;

  static Location community() { return {}; }
  static Location nursing_home(FacilityId f) { return {LocationKind::NursingHome, f}; }
  static Location acute(FacilityId f) { return {LocationKind::HospitalAcute, f}; }
  static Location icu(FacilityId f) { return {LocationKind::HospitalIcu, f}; }

  bool in_community() const { return kind == LocationKind::Community; }
  bool in_hospital() const {
    return kind == LocationKind::HospitalAcute || kind == LocationKind::HospitalIcu;
  }

  friend bool operator==(const Location&, const Location&) = default;
};

struct Agent {
  AgentId id = 0;
  AgeGroup age = AgeGroup::Under50;
  CountyId county = 0;
  Location location;
  // Where the agent goes back to after a hospital stay.
  Location residence;
  CovidState state = CovidState::Susceptible;
  bool vaccinated = false;
  bool vaccine_immune = false;
  bool is_hcw = false;
  bool reported = false;
  bool alive = true;
  std::optional<int> recovery_day;
  std::optional<int> discharge_day;
};

enum class FacilityKind : std::uint8_t { NursingHome, Hospital };

struct Facility {
  FacilityId id = 0;
  FacilityKind kind = FacilityKind::NursingHome;
  CountyId county = 0;
  int acute_beds = 0;
  int icu_beds = 0;
  int nh_capacity = 0;
  // Residents placed at world synthesis.
  int nh_occupancy = 0;
  double lat = 0.0;
  double lon = 0.0;

  // Runtime occupancy.
  int acute_occupied = 0;
  int icu_occupied = 0;
  int residents = 0;

  bool is_hospital() const { return kind == FacilityKind::Hospital; }
  bool is_nursing_home() const { return kind == FacilityKind::NursingHome; }
};

struct County {
  CountyId id = 0;
  std::string name;
  std::int64_t population = 0;
  std::array<double, kNumAgeGroups> age_shares{};
  // Centroid, degrees.
  double lat = 0.0;
  double lon = 0.0;
};

enum class HcwType : std::uint8_t {
  SingleSiteFullTime = 0,
  SingleSitePartTime = 1,
  Multisite = 2,
  Contract = 3,
};

inline constexpr std::size_t kNumHcwTypes = 4;

inline constexpr std::array<HcwType, kNumHcwTypes> kHcwTypes{
    HcwType::SingleSiteFullTime, HcwType::SingleSitePartTime, HcwType::Multisite,
    HcwType::Contract};

inline constexpr std::size_t index_of(HcwType t) { return static_cast<std::size_t>(t); }

inline const char* name_of(HcwType t) {
  switch (t) {
    case HcwType::SingleSiteFullTime: return "single_site_full_time";
    case HcwType::SingleSitePartTime: return "single_site_part_time";
    case HcwType::Multisite: return "multisite";
    case HcwType::Contract: return "contract";
  }
  return "?";
}

struct HcwAssignment {
  AgentId agent = 0;
  HcwType type = HcwType::SingleSiteFullTime;
  CountyId home_county = 0;
  // kNoFacility for contract workers, who have no primary site.
  FacilityId primary = kNoFacility;
  std::vector<FacilityId> secondary;

  std::vector<FacilityId> facilities() const {
    std::vector<FacilityId> all;
    if (primary != kNoFacility) all.push_back(primary);
    all.insert(all.end(), secondary.begin(), secondary.end());
    return all;
  }
};

struct Visitor {
  AgentId agent = 0;
  double daily_probability = 0.0;
  // 1-based position in the resident's visitor list.
  int index = 1;
};

struct VisitorAssignment {
  AgentId resident = 0;
  FacilityId facility = kNoFacility;
  // Number drawn from the visitor-count distribution; visitors.size() can be
  // smaller when the community pool ran out.
  int drawn_count = 0;
  std::vector<Visitor> visitors;
};

/// Susceptible community agents bucketed by (county, age group), with O(1)
/// insert, removal and uniform sampling.
class SusceptiblePools {
 public:
  SusceptiblePools() = default;
  SusceptiblePools(std::size_t n_counties, std::size_t n_agents)
      : buckets_(n_counties * kNumAgeGroups), pos_(n_agents, -1) {}

  std::size_t n_counties() const { return buckets_.size() / kNumAgeGroups; }

  const std::vector<AgentId>& bucket(CountyId c, AgeGroup a) const {
    return buckets_[cell(c, a)];
  }

  std::size_t size(CountyId c) const {
    std::size_t n = 0;
    for (auto a : kAgeGroups) n += bucket(c, a).size();
    return n;
  }

  bool contains(AgentId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < pos_.size() && pos_[id] >= 0;
  }

  void insert(const Agent& agent) {
    if (contains(agent.id)) return;
    auto& b = buckets_[cell(agent.county, agent.age)];
    pos_[agent.id] = static_cast<std::int64_t>(b.size());
    b.push_back(agent.id);
  }

  void remove(const Agent& agent) {
    if (!contains(agent.id)) return;
    auto& b = buckets_[cell(agent.county, agent.age)];
    const auto p = static_cast<std::size_t>(pos_[agent.id]);
    const AgentId last = b.back();
    b[p] = last;
    pos_[last] = static_cast<std::int64_t>(p);
    b.pop_back();
    pos_[agent.id] = -1;
  }

  /// Age group by `weights` (renormalised over non-empty groups), then a
  /// uniform member of that group.
  std::optional<AgentId> sample(CountyId c, const std::array<double, kNumAgeGroups>& weights,
                                RngStream& rng) const {
    std::array<double, kNumAgeGroups> w{};
    for (auto a : kAgeGroups) w[index_of(a)] = bucket(c, a).empty() ? 0.0 : weights[index_of(a)];
    const std::size_t g = rng.weighted_index(w);
    if (g == kNumAgeGroups) return std::nullopt;
    const auto& b = bucket(c, kAgeGroups[g]);
    return b[rng.uniform_below(b.size())];
  }

 private:
  std::size_t cell(CountyId c, AgeGroup a) const {
    return static_cast<std::size_t>(c) * kNumAgeGroups + index_of(a);
  }

  std::vector<std::vector<AgentId>> buckets_;
  std::vector<std::int64_t> pos_;
};

struct World {
  std::vector<County> counties;
  std::vector<Facility> facilities;
  std::vector<Agent> agents;
  double scale_factor = 1.0;

  std::vector<HcwAssignment> hcws;
  std::vector<VisitorAssignment> visitors;
  SusceptiblePools susceptible;
  bool initialized = false;

  const Agent* find(AgentId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= agents.size()) return nullptr;
    return &agents[static_cast<std::size_t>(id)];
  }
  Agent* find(AgentId id) {
    if (id < 0 || static_cast<std::size_t>(id) >= agents.size()) return nullptr;
    return &agents[static_cast<std::size_t>(id)];
  }
  Agent& agent(AgentId id) { return agents[static_cast<std::size_t>(id)]; }
  const Agent& agent(AgentId id) const { return agents[static_cast<std::size_t>(id)]; }
  Facility& facility(FacilityId id) { return facilities[static_cast<std::size_t>(id)]; }
  const Facility& facility(FacilityId id) const {
    return facilities[static_cast<std::size_t>(id)];
  }

  std::vector<AgentId> nh_residents() const {
    std::vector<AgentId> out;
    for (const auto& a : agents)
      if (a.alive && a.location.kind == LocationKind::NursingHome) out.push_back(a.id);
    return out;
  }

  /// Rebuild the susceptible pools from agent state.
  void rebuild_susceptible_pools() {
    susceptible = SusceptiblePools(counties.size(), agents.size());
    for (const auto& a : agents)
      if (a.alive && a.location.in_community() && a.state == CovidState::Susceptible)
        susceptible.insert(a);
  }

  /// Removal of an agent by the surrounding model (death, out-migration).
  /// The record stays so that ids remain stable.
  void remove_agent(AgentId id) {
    Agent& a = agent(id);
    susceptible.remove(a);
    a.alive = false;
  }

  /// Age-group head count of a county's agents.
  std::array<std::int64_t, kNumAgeGroups> county_age_counts(CountyId c) const {
    std::array<std::int64_t, kNumAgeGroups> n{};
    for (const auto& a : agents)
      if (a.county == c) ++n[index_of(a.age)];
    return n;
  }
};

/// Great-circle distance in statute miles.
inline double great_circle_miles(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusMiles = 3958.7613;
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(h)));
}

inline double county_distance_miles(const World& w, CountyId a, CountyId b) {
  if (a == b) return 0.0;
  const County& ca = w.counties[static_cast<std::size_t>(a)];
  const County& cb = w.counties[static_cast<std::size_t>(b)];
  return great_circle_miles(ca.lat, ca.lon, cb.lat, cb.lon);
}

}  // namespace facsim
