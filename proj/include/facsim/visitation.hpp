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
#include <optional>
#include <unordered_map>
#include <vector>

#include "facsim/common.hpp"
#include "facsim/rng.hpp"
#include "facsim/world.hpp"

namespace facsim {

inline constexpr std::size_t kMaxVisitors = 3;

struct VisitationParams {
  // P(resident has exactly k visitors), k = 0..3.
  std::array<double, kMaxVisitors + 1> count_probs{0.15, 0.45, 0.25, 0.15};
  // Daily visit probability of the k-th visitor.
  std::array<double, kMaxVisitors> daily_probs{0.50, 0.16, 0.03};
  // Age distribution of the k-th visitor.
  std::array<std::array<double, kNumAgeGroups>, kMaxVisitors> age_dists{{
      {0.10, 0.20, 0.70},
      {0.20, 0.40, 0.40},
      {0.40, 0.40, 0.20},
  }};
  // Multiplier on visiting for visitors with mild illness (0.4 = a 60%
  // reduction).
  double mild_visit_factor = 0.4;

  void validate() const {
    auto dist = [](auto const& d, const char* what) {
      double s = 0.0;
      for (double p : d) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(what) + ": probability outside [0, 1]");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-9) throw ConfigError(std::string(what) + ": must sum to 1");
    };
    dist(count_probs, "visitor count distribution");
    for (const auto& a : age_dists) dist(a, "visitor age distribution");
    for (double p : daily_probs)
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("daily visit probability outside [0, 1]");
    if (!(mild_visit_factor >= 0.0 && mild_visit_factor <= 1.0))
      throw ConfigError("mild visit factor outside [0, 1]");
  }
};

struct VisitPolicy {
  bool enabled = true;
  // Applies to every nursing home when set; otherwise only to the listed ones.
  bool require_vaccination_proof = false;
  std::vector<FacilityId> proof_required_facilities;
  std::optional<int> max_visits_per_week;
  std::optional<int> max_visits_per_month;

  bool requires_proof(FacilityId f) const {
    return require_vaccination_proof ||
           std::find(proof_required_facilities.begin(), proof_required_facilities.end(), f) !=
               proof_required_facilities.end();
  }

  void validate() const {
    if ((max_visits_per_week && *max_visits_per_week < 0) ||
        (max_visits_per_month && *max_visits_per_month < 0))
      throw ConfigError("visit caps must be >= 0");
  }
};

/// Community agents indexed by (county, age group) for visitor draws.
class CommunityIndex {
 public:
  explicit CommunityIndex(const World& w) : by_cell_(w.counties.size() * kNumAgeGroups), by_age_(kNumAgeGroups) {
    for (const auto& a : w.agents) {
      if (!a.alive || !a.location.in_community()) continue;
      by_cell_[static_cast<std::size_t>(a.county) * kNumAgeGroups + index_of(a.age)].push_back(a.id);
      by_age_[index_of(a.age)].push_back(a.id);
    }
  }

  const std::vector<AgentId>& cell(CountyId c, AgeGroup a) const {
    return by_cell_[static_cast<std::size_t>(c) * kNumAgeGroups + index_of(a)];
  }
  const std::vector<AgentId>& statewide(AgeGroup a) const { return by_age_[index_of(a)]; }

 private:
  std::vector<std::vector<AgentId>> by_cell_;
  std::vector<std::vector<AgentId>> by_age_;
};

namespace detail {

/// Uniform member of `pool` not in `exclude`, or nullopt if none is left.
inline std::optional<AgentId> pick_excluding(const std::vector<AgentId>& pool,
                                             const std::vector<AgentId>& exclude, RngStream& rng) {
  if (pool.empty()) return std::nullopt;
  auto excluded = [&](AgentId id) { return std::find(exclude.begin(), exclude.end(), id) != exclude.end(); };
  // `exclude` holds at most four ids, so a few rejections almost always suffice.
  for (int tries = 0; tries < 16; ++tries) {
    const AgentId id = pool[rng.uniform_below(pool.size())];
    if (!excluded(id)) return id;
  }
  std::vector<AgentId> rest;
  for (AgentId id : pool)
    if (!excluded(id)) rest.push_back(id);
  if (rest.empty()) return std::nullopt;
  return rest[rng.uniform_below(rest.size())];
}

}  // namespace detail

/// Draw 0-3 visitors for a nursing-home resident. The k-th visitor's age
/// group comes from age_dists[k]; the visitor is a distinct community agent
/// of that age from the resident's home county, or statewide when the county
/// has none left.
inline VisitorAssignment assign_visitors(AgentId resident, const World& world, const CommunityIndex& index,
                                         const VisitationParams& params, RngStream& rng) {
  const Agent& r = world.agent(resident);
  if (r.location.kind != LocationKind::NursingHome)
    throw ConfigError("agent " + std::to_string(resident) + " is not a nursing home resident");
  VisitorAssignment va;
  va.resident = resident;
  va.facility = r.location.facility;
  va.drawn_count = static_cast<int>(rng.weighted_index(params.count_probs));
  std::vector<AgentId> taken{resident};
  for (int k = 0; k < va.drawn_count; ++k) {
    const auto age = kAgeGroups[rng.weighted_index(params.age_dists[static_cast<std::size_t>(k)])];
    auto pick = detail::pick_excluding(index.cell(r.county, age), taken, rng);
    if (!pick) pick = detail::pick_excluding(index.statewide(age), taken, rng);
    if (!pick) continue;
    taken.push_back(*pick);
    va.visitors.push_back({*pick, params.daily_probs[static_cast<std::size_t>(k)], k + 1});
  }
  return va;
}

/// Visit days per (visitor, facility), for the weekly/monthly caps. Windows
/// are rolling: the last 7 and the last 30 days including today.
class VisitTracker {
 public:
  int visits_within(AgentId visitor, FacilityId f, int day, int window) const {
    auto it = days_.find(key(visitor, f));
    if (it == days_.end()) return 0;
    return static_cast<int>(std::count_if(it->second.begin(), it->second.end(),
                                          [&](int d) { return d > day - window && d <= day; }));
  }
  void record(AgentId visitor, FacilityId f, int day) { days_[key(visitor, f)].push_back(day); }

 private:
  static std::uint64_t key(AgentId v, FacilityId f) {
    return (static_cast<std::uint64_t>(v) << 20) ^ static_cast<std::uint64_t>(f);
  }
  std::unordered_map<std::uint64_t, std::vector<int>> days_;
};

struct VisitOutcome {
  AgentId visitor = 0;
  int visitor_index = 1;
  // 0 when the visit happened, otherwise the first barrier (1-7) that failed.
  int barrier = 0;
};

/// Today's visits to one resident. Barriers, in order: selected today;
/// visitor in the community; alive; not severe/critical; mild visitors go
/// with `mild_visit_factor`; vaccination proof where required; visit caps.
inline std::vector<VisitOutcome> simulate_visits(const VisitorAssignment& va, const VisitPolicy& policy,
                                                 const VisitationParams& params, int day, const World& world,
                                                 VisitTracker& tracker, RngStream& rng) {
  std::vector<VisitOutcome> out;
  if (!policy.enabled) return out;
  for (const auto& v : va.visitors) {
    VisitOutcome o{v.agent, v.index, 0};
    const Agent& a = world.agent(v.agent);
    if (!rng.bernoulli(v.daily_probability)) o.barrier = 1;
    else if (!a.location.in_community()) o.barrier = 2;
    else if (!a.alive) o.barrier = 3;
    else if (is_hospital_severity(a.state)) o.barrier = 4;
    else if (a.state == CovidState::Mild && !rng.bernoulli(params.mild_visit_factor)) o.barrier = 5;
    else if (policy.requires_proof(va.facility) && !a.vaccinated) o.barrier = 6;
    else if ((policy.max_visits_per_week &&
              tracker.visits_within(v.agent, va.facility, day, 7) >= *policy.max_visits_per_week) ||
             (policy.max_visits_per_month &&
              tracker.visits_within(v.agent, va.facility, day, 30) >= *policy.max_visits_per_month))
      o.barrier = 7;
    if (o.barrier == 0) tracker.record(v.agent, va.facility, day);
    out.push_back(o);
  }
  return out;
}

}  // namespace facsim
