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
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "facsim/common.hpp"
#include "facsim/rng.hpp"
#include "facsim/world.hpp"

namespace facsim {

/// Upper bounds on the share of workers whose (secondary) site lies beyond a
/// distance from their home county.
struct DistanceCaps {
  double multisite_over_50 = 0.10;
  double multisite_over_100 = 0.05;
  double contract_over_50 = 0.40;
  double contract_over_100 = 0.20;
  double contract_over_200 = 0.05;
};

struct WorkforceParams {
  // Probability that a given day is a workday, per HcwType.
  std::array<double, kNumHcwTypes> workday_probability{5.0 / 7.0, 2.5 / 7.0, 5.0 / 7.0, 4.0 / 7.0};
  // Share of a facility's daily hours covered by each type.
  std::array<double, kNumHcwTypes> hours_share{0.5, 0.2, 0.2, 0.1};
  int contract_facility_count = 3;
  double shift_hours = 8.0;
  // Multiplier on attendance for HCWs with mild illness (0.2 = an 80%
  // reduction).
  double mild_attendance_factor = 0.2;
  DistanceCaps caps;

  void validate() const {
    double s = 0.0;
    for (std::size_t t = 0; t < kNumHcwTypes; ++t) {
      if (!(workday_probability[t] > 0.0 && workday_probability[t] <= 1.0))
        throw ConfigError("workday probability must be in (0, 1]");
      if (!(hours_share[t] >= 0.0)) throw ConfigError("hours share must be >= 0");
      s += hours_share[t];
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError("hours shares must sum to 1");
    if (contract_facility_count < 1) throw ConfigError("contract facility count must be >= 1");
    if (!(shift_hours > 0.0)) throw ConfigError("shift hours must be positive");
    if (!(mild_attendance_factor >= 0.0 && mild_attendance_factor <= 1.0))
      throw ConfigError("mild attendance factor outside [0, 1]");
    for (double c : {caps.multisite_over_50, caps.multisite_over_100, caps.contract_over_50,
                     caps.contract_over_100, caps.contract_over_200})
      if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("distance cap outside [0, 1]");
  }
};

/// Staffing row: average daily nurse and non-nurse hours of a nursing home.
struct PbjRow {
  FacilityId facility = 0;
  CountyId county = 0;
  double nurse_hours = 0.0;
  double non_nurse_hours = 0.0;

  double total_hours() const { return nurse_hours + non_nurse_hours; }
};

/// Worker-equivalents per type for one nursing home. A single-site worker
/// counts once at its facility; a multisite target of n means n primaries and
/// n secondaries at the facility; a contract target of n means
/// n * contract_facility_count contract workers list the facility.
struct FacilityStaffTarget {
  FacilityId facility = 0;
  CountyId county = 0;
  double avg_daily_hours = 0.0;
  std::array<std::int64_t, kNumHcwTypes> target{};
};

/// target_t = round((share_t * hours + carry) / (shift * p_t)), types in
/// order, where carry is the hours left unassigned by the previous roundings.
/// Total expected hours stay within half a shift of the PBJ hours.
inline std::vector<FacilityStaffTarget> compute_staff_targets(const std::vector<PbjRow>& pbj,
                                                              const World& world,
                                                              const WorkforceParams& params) {
  params.validate();
  std::vector<FacilityStaffTarget> out;
  for (const auto& f : world.facilities) {
    if (!f.is_nursing_home()) continue;
    auto row = std::find_if(pbj.begin(), pbj.end(), [&](const PbjRow& r) { return r.facility == f.id; });
    if (row == pbj.end())
      throw ConfigError("nursing home " + std::to_string(f.id) + " has no PBJ staffing row");
    FacilityStaffTarget t;
    t.facility = f.id;
    t.county = f.county;
    t.avg_daily_hours = row->total_hours();
    if (!(t.avg_daily_hours >= 0.0))
      throw ConfigError("nursing home " + std::to_string(f.id) + " has negative staffing hours");
    double carry = 0.0;
    for (std::size_t k = 0; k < kNumHcwTypes; ++k) {
      const double per_worker = params.shift_hours * params.workday_probability[k];
      const double want = params.hours_share[k] * t.avg_daily_hours + carry;
      t.target[k] = std::max<std::int64_t>(0, std::llround(want / per_worker));
      carry = want - static_cast<double>(t.target[k]) * per_worker;
    }
    out.push_back(t);
  }
  return out;
}

/// Expected daily hours delivered to the facility by its targets.
inline double expected_daily_hours(const FacilityStaffTarget& t, const WorkforceParams& params) {
  double h = 0.0;
  for (std::size_t k = 0; k < kNumHcwTypes; ++k)
    h += static_cast<double>(t.target[k]) * params.shift_hours * params.workday_probability[k];
  return h;
}

namespace detail {

/// Successive-shortest-path min-cost flow (Bellman-Ford on small graphs).
class MinCostFlow {
 public:
  explicit MinCostFlow(std::size_t n) : adj_(n) {}

  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t cap, std::int64_t cost) {
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap, cost});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, 0, -cost});
    return edges_.size() - 2;
  }

  std::int64_t flow_on(std::size_t edge) const { return edges_[edge ^ 1].cap; }

  /// Pushes up to `limit` units; returns the amount pushed.
  std::int64_t run(std::size_t s, std::size_t t, std::int64_t limit) {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    std::int64_t pushed = 0;
    const std::size_t n = adj_.size();
    while (pushed < limit) {
      std::vector<std::int64_t> dist(n, kInf);
      std::vector<std::size_t> via(n, SIZE_MAX);
      std::vector<bool> queued(n, false);
      std::deque<std::size_t> q{s};
      dist[s] = 0;
      queued[s] = true;
      while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop_front();
        queued[u] = false;
        for (std::size_t e : adj_[u]) {
          const Edge& ed = edges_[e];
          if (ed.cap > 0 && dist[u] + ed.cost < dist[ed.to]) {
            dist[ed.to] = dist[u] + ed.cost;
            via[ed.to] = e;
            if (!queued[ed.to]) {
              queued[ed.to] = true;
              q.push_back(ed.to);
            }
          }
        }
      }
      if (dist[t] == kInf) break;
      std::int64_t f = limit - pushed;
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) f = std::min(f, edges_[via[v]].cap);
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].cap -= f;
        edges_[via[v] ^ 1].cap += f;
      }
      pushed += f;
    }
    return pushed;
  }

 private:
  struct Edge {
    std::size_t to;
    std::int64_t cap;
    std::int64_t cost;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
};

/// Cost of sending a worker from `home` to a facility in `dest`. Tiers are
/// lexicographic: same county < within 50 mi < 100 mi < 200 mi < beyond;
/// within a tier nearer wins and a small random jitter breaks ties.
inline std::int64_t placement_cost(const World& w, CountyId home, CountyId dest, RngStream& rng) {
  const double miles = county_distance_miles(w, home, dest);
  std::int64_t tier = 0;
  if (home != dest) {
    if (miles <= 50.0) tier = 10'000;
    else if (miles <= 100.0) tier = 10'000'000;
    else if (miles <= 200.0) tier = 10'000'000'000;
    else tier = 10'000'000'000'000;
  }
  return tier + static_cast<std::int64_t>(std::llround(miles * 10.0)) +
         static_cast<std::int64_t>(rng.uniform_below(10));
}

}  // namespace detail

/// Draw `n` distinct ids uniformly from `pool` (partial Fisher-Yates; the
/// chosen ids are removed from the pool).
inline std::vector<AgentId> draw_without_replacement(std::vector<AgentId>& pool, std::size_t n,
                                                     RngStream& rng) {
  std::vector<AgentId> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_below(pool.size()));
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

struct CapCheck {
  std::string name;
  double cap = 0.0;
  std::int64_t over = 0;
  std::int64_t total = 0;

  double fraction() const { return total > 0 ? static_cast<double>(over) / static_cast<double>(total) : 0.0; }
  bool ok() const { return static_cast<double>(over) <= cap * static_cast<double>(total) + 1e-12; }
};

/// The five distance caps evaluated on a set of assignments.
inline std::vector<CapCheck> distance_cap_checks(const World& world,
                                                 const std::vector<HcwAssignment>& hcws,
                                                 const WorkforceParams& params) {
  CapCheck m50{"multisite_over_50_miles", params.caps.multisite_over_50};
  CapCheck m100{"multisite_over_100_miles", params.caps.multisite_over_100};
  CapCheck c50{"contract_over_50_miles", params.caps.contract_over_50};
  CapCheck c100{"contract_over_100_miles", params.caps.contract_over_100};
  CapCheck c200{"contract_over_200_miles", params.caps.contract_over_200};
  for (const auto& h : hcws) {
    double far = 0.0;
    for (FacilityId f : h.secondary)
      far = std::max(far, county_distance_miles(world, h.home_county, world.facility(f).county));
    if (h.type == HcwType::Multisite) {
      ++m50.total;
      ++m100.total;
      m50.over += far > 50.0;
      m100.over += far > 100.0;
    } else if (h.type == HcwType::Contract) {
      ++c50.total;
      ++c100.total;
      ++c200.total;
      c50.over += far > 50.0;
      c100.over += far > 100.0;
      c200.over += far > 200.0;
    }
  }
  return {m50, m100, c50, c100, c200};
}

/// Create HCWs and assign them to nursing homes:
///  1. targets per facility and type are given;
///  2. employees (the three non-contract types) are drawn from each county's
///     community agents in the number its facilities need;
///  3. contract workers are drawn statewide, county weighted by population;
///  4. employees get a random primary facility in their home county;
///  5. multisite employees get a secondary facility, home county first and
///     then nearest, such that every facility receives as many multisite
///     secondaries as it has multisite primaries;
///  6. contract workers get `contract_facility_count` distinct facilities,
///     filling each facility's contract slots.
/// Steps 5 and 6 are solved as min-cost flows over county-distance tiers.
/// Throws ConfigError when the pool is too small, the slots cannot be filled,
/// or a distance cap is violated.
inline std::vector<HcwAssignment> assign_hcws(World& world, const std::vector<FacilityStaffTarget>& targets,
                                              const WorkforceParams& params, RngStream& rng) {
  params.validate();
  const std::size_t n_counties = world.counties.size();
  const std::size_t n_fac = world.facilities.size();
  const auto k_contract = static_cast<std::int64_t>(params.contract_facility_count);

  std::vector<std::vector<AgentId>> eligible(n_counties);
  for (const auto& a : world.agents)
    if (a.alive && a.location.in_community() && a.residence.in_community() && !a.is_hcw)
      eligible[static_cast<std::size_t>(a.county)].push_back(a.id);

  std::vector<HcwAssignment> out;

  // Steps 2 and 4.
  for (std::size_t c = 0; c < n_counties; ++c) {
    std::int64_t need = 0;
    for (const auto& t : targets)
      if (static_cast<std::size_t>(t.county) == c)
        need += t.target[0] + t.target[1] + t.target[2];
    if (need > static_cast<std::int64_t>(eligible[c].size()))
      throw ConfigError("county " + std::to_string(c) + " needs " + std::to_string(need) +
                        " employee HCWs but has " + std::to_string(eligible[c].size()) +
                        " eligible community agents");
    auto chosen = draw_without_replacement(eligible[c], static_cast<std::size_t>(need), rng);
    rng.shuffle(chosen);
    std::size_t next = 0;
    for (const auto& t : targets) {
      if (static_cast<std::size_t>(t.county) != c) continue;
      for (HcwType type : {HcwType::SingleSiteFullTime, HcwType::SingleSitePartTime, HcwType::Multisite})
        for (std::int64_t k = 0; k < t.target[index_of(type)]; ++k) {
          HcwAssignment h;
          h.agent = chosen[next++];
          h.type = type;
          h.home_county = static_cast<CountyId>(c);
          h.primary = t.facility;
          out.push_back(h);
        }
    }
  }

  // Step 5: groups are (home county, primary); each group sends one unit per
  // worker to facilities other than its primary.
  {
    std::map<std::pair<CountyId, FacilityId>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i].type == HcwType::Multisite) groups[{out[i].home_county, out[i].primary}].push_back(i);
    std::vector<std::int64_t> slots(n_fac, 0);
    std::int64_t demand = 0;
    for (const auto& t : targets) {
      slots[static_cast<std::size_t>(t.facility)] = t.target[index_of(HcwType::Multisite)];
      demand += t.target[index_of(HcwType::Multisite)];
    }
    const std::size_t src = 0, sink = 1, g0 = 2, f0 = g0 + groups.size();
    detail::MinCostFlow mcf(f0 + n_fac);
    std::vector<std::vector<std::pair<FacilityId, std::size_t>>> group_edges(groups.size());
    std::size_t gi = 0;
    for (const auto& [key, members] : groups) {
      mcf.add_edge(src, g0 + gi, static_cast<std::int64_t>(members.size()), 0);
      for (std::size_t f = 0; f < n_fac; ++f) {
        if (slots[f] == 0 || static_cast<FacilityId>(f) == key.second) continue;
        const auto cost = detail::placement_cost(world, key.first, world.facilities[f].county, rng);
        group_edges[gi].emplace_back(static_cast<FacilityId>(f),
                                     mcf.add_edge(g0 + gi, f0 + f, static_cast<std::int64_t>(members.size()), cost));
      }
      ++gi;
    }
    for (std::size_t f = 0; f < n_fac; ++f)
      if (slots[f] > 0) mcf.add_edge(f0 + f, sink, slots[f], 0);
    if (mcf.run(src, sink, demand) != demand)
      throw ConfigError("multisite secondary assignment infeasible: a facility holds more than half of "
                        "all multisite workers");
    gi = 0;
    for (auto& [key, members] : groups) {
      rng.shuffle(members);
      std::size_t m = 0;
      for (const auto& [f, e] : group_edges[gi])
        for (std::int64_t u = 0; u < mcf.flow_on(e); ++u) out[members[m++]].secondary = {f};
      ++gi;
    }
  }

  // Steps 3 and 6.
  {
    std::int64_t n_workers = 0;
    std::vector<std::int64_t> slots(n_fac, 0);
    for (const auto& t : targets) {
      n_workers += t.target[index_of(HcwType::Contract)];
      slots[static_cast<std::size_t>(t.facility)] = t.target[index_of(HcwType::Contract)] * k_contract;
    }
    std::vector<std::vector<AgentId>> by_county(n_counties);
    std::vector<double> weight(n_counties);
    for (std::size_t c = 0; c < n_counties; ++c)
      weight[c] = eligible[c].empty() ? 0.0 : static_cast<double>(world.counties[c].population);
    for (std::int64_t k = 0; k < n_workers; ++k) {
      const std::size_t c = rng.weighted_index(weight);
      if (c == n_counties) throw ConfigError("not enough community agents for contract workers");
      by_county[c].push_back(draw_without_replacement(eligible[c], 1, rng).front());
      if (eligible[c].empty()) weight[c] = 0.0;
    }
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < n_counties; ++c)
      if (!by_county[c].empty()) active.push_back(c);
    const std::size_t src = 0, sink = 1, g0 = 2, f0 = g0 + active.size();
    detail::MinCostFlow mcf(f0 + n_fac);
    std::vector<std::vector<std::pair<FacilityId, std::size_t>>> group_edges(active.size());
    for (std::size_t gi = 0; gi < active.size(); ++gi) {
      const auto n = static_cast<std::int64_t>(by_county[active[gi]].size());
      mcf.add_edge(src, g0 + gi, n * k_contract, 0);
      for (std::size_t f = 0; f < n_fac; ++f) {
        if (slots[f] == 0) continue;
        const auto cost = detail::placement_cost(world, static_cast<CountyId>(active[gi]),
                                                 world.facilities[f].county, rng);
        // A worker lists a facility at most once.
        group_edges[gi].emplace_back(static_cast<FacilityId>(f), mcf.add_edge(g0 + gi, f0 + f, n, cost));
      }
    }
    for (std::size_t f = 0; f < n_fac; ++f)
      if (slots[f] > 0) mcf.add_edge(f0 + f, sink, slots[f], 0);
    if (mcf.run(src, sink, n_workers * k_contract) != n_workers * k_contract)
      throw ConfigError("contract assignment infeasible: a facility needs more contract workers than exist");

    for (std::size_t gi = 0; gi < active.size(); ++gi) {
      auto& members = by_county[active[gi]];
      rng.shuffle(members);
      // Remaining units per facility. With r workers left every entry must
      // stay <= r, so a worker must take each entry equal to r and fills
      // the rest nearest-first; far units end up on as few workers as possible.
      struct Left {
        std::int64_t units;
        double miles;
        FacilityId f;
      };
      std::vector<Left> remaining;
      for (const auto& [f, e] : group_edges[gi])
        if (mcf.flow_on(e) > 0)
          remaining.push_back({mcf.flow_on(e),
                               county_distance_miles(world, static_cast<CountyId>(active[gi]),
                                                     world.facility(f).county),
                               f});
      std::stable_sort(remaining.begin(), remaining.end(),
                       [](const Left& a, const Left& b) { return a.miles < b.miles; });
      auto r = static_cast<std::int64_t>(members.size());
      for (AgentId id : members) {
        HcwAssignment h;
        h.agent = id;
        h.type = HcwType::Contract;
        h.home_county = static_cast<CountyId>(active[gi]);
        std::vector<bool> taken(remaining.size(), false);
        for (std::size_t j = 0; j < remaining.size(); ++j)
          if (remaining[j].units == r) taken[j] = true;
        auto n_taken = std::count(taken.begin(), taken.end(), true);
        for (std::size_t j = 0; j < remaining.size() && n_taken < k_contract; ++j)
          if (!taken[j] && remaining[j].units > 0) {
            taken[j] = true;
            ++n_taken;
          }
        for (std::size_t j = 0; j < remaining.size(); ++j)
          if (taken[j]) {
            h.secondary.push_back(remaining[j].f);
            --remaining[j].units;
          }
        --r;
        out.push_back(h);
      }
    }
  }

  for (const auto& c : distance_cap_checks(world, out, params))
    if (!c.ok())
      throw ConfigError("HCW distance cap violated: " + c.name + " (" + std::to_string(c.over) + " of " +
                        std::to_string(c.total) + " > " + format_double(c.cap) + ")");

  for (const auto& h : out) world.agent(h.agent).is_hcw = true;
  world.hcws = out;
  return out;
}

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The eleven assignment criteria, each evaluated exactly.
inline std::vector<CriterionResult> check_hcw_criteria(const World& world,
                                                       const std::vector<FacilityStaffTarget>& targets,
                                                       const std::vector<HcwAssignment>& hcws,
                                                       const WorkforceParams& params) {
  std::vector<CriterionResult> out;
  const std::size_t n_fac = world.facilities.size();
  const std::size_t k = static_cast<std::size_t>(params.contract_facility_count);

  {
    std::vector<std::array<std::int64_t, 5>> got(n_fac, std::array<std::int64_t, 5>{});
    for (const auto& h : hcws) {
      switch (h.type) {
        case HcwType::SingleSiteFullTime:
        case HcwType::SingleSitePartTime:
          if (h.primary != kNoFacility) ++got[static_cast<std::size_t>(h.primary)][index_of(h.type)];
          break;
        case HcwType::Multisite:
          if (h.primary != kNoFacility) ++got[static_cast<std::size_t>(h.primary)][2];
          for (FacilityId f : h.secondary) ++got[static_cast<std::size_t>(f)][3];
          break;
        case HcwType::Contract:
          for (FacilityId f : h.secondary) ++got[static_cast<std::size_t>(f)][4];
          break;
      }
    }
    std::string bad;
    for (const auto& t : targets) {
      const auto& g = got[static_cast<std::size_t>(t.facility)];
      const std::array<std::int64_t, 5> want{t.target[0], t.target[1], t.target[2], t.target[2],
                                             t.target[3] * static_cast<std::int64_t>(k)};
      if (g != want && bad.empty()) bad = "facility " + std::to_string(t.facility) + " staffing differs from target";
    }
    out.push_back({"facility_targets_met", bad.empty(), bad});
  }
  {
    std::set<AgentId> seen;
    std::int64_t dup = 0;
    for (const auto& h : hcws) dup += !seen.insert(h.agent).second;
    out.push_back({"no_agent_assigned_twice", dup == 0, std::to_string(dup) + " duplicates"});
  }
  {
    std::int64_t bad = 0;
    for (const auto& h : hcws)
      if ((h.type == HcwType::SingleSiteFullTime || h.type == HcwType::SingleSitePartTime) &&
          (h.primary == kNoFacility || !h.secondary.empty()))
        ++bad;
    out.push_back({"single_site_exactly_one_facility", bad == 0, std::to_string(bad) + " violations"});
  }
  {
    std::int64_t bad_count = 0, bad_distinct = 0;
    for (const auto& h : hcws) {
      if (h.type != HcwType::Multisite) continue;
      if (h.primary == kNoFacility || h.secondary.size() != 1) ++bad_count;
      else if (h.secondary.front() == h.primary) ++bad_distinct;
    }
    out.push_back({"multisite_primary_and_secondary", bad_count == 0, std::to_string(bad_count) + " violations"});
    out.push_back({"multisite_sites_distinct", bad_distinct == 0, std::to_string(bad_distinct) + " violations"});
  }
  {
    std::int64_t bad = 0;
    for (const auto& h : hcws) {
      if (h.type != HcwType::Contract) continue;
      std::set<FacilityId> distinct(h.secondary.begin(), h.secondary.end());
      if (h.primary != kNoFacility || h.secondary.size() != k || distinct.size() != k) ++bad;
    }
    out.push_back({"contract_facility_count", bad == 0, std::to_string(bad) + " violations"});
  }
  for (const auto& c : distance_cap_checks(world, hcws, params))
    out.push_back({c.name, c.ok(),
                   std::to_string(c.over) + "/" + std::to_string(c.total) + " (cap " + format_double(c.cap) + ")"});
  return out;
}

enum class AbsenceReason : std::uint8_t {
  NotWorkday = 1,
  NotInCommunity = 2,
  NotAlive = 3,
  SevereOrCritical = 4,
  MildStayedHome = 5,
};

struct AttendanceOutcome {
  bool attended = false;
  FacilityId facility = kNoFacility;
  std::optional<AbsenceReason> reason;
  double hours = 0.0;
};

/// One HCW-day: workday draw, then the four attendance conditions, then the
/// facility for workers with several sites.
inline AttendanceOutcome simulate_attendance(const HcwAssignment& hcw, const Agent& agent,
                                             const WorkforceParams& params, RngStream& rng) {
  AttendanceOutcome o;
  if (!rng.bernoulli(params.workday_probability[index_of(hcw.type)])) {
    o.reason = AbsenceReason::NotWorkday;
    return o;
  }
  if (!agent.location.in_community()) {
    o.reason = AbsenceReason::NotInCommunity;
    return o;
  }
  if (!agent.alive) {
    o.reason = AbsenceReason::NotAlive;
    return o;
  }
  if (is_hospital_severity(agent.state)) {
    o.reason = AbsenceReason::SevereOrCritical;
    return o;
  }
  if (agent.state == CovidState::Mild && !rng.bernoulli(params.mild_attendance_factor)) {
    o.reason = AbsenceReason::MildStayedHome;
    return o;
  }
  const auto sites = hcw.facilities();
  o.facility = sites.size() == 1 ? sites.front() : sites[rng.uniform_below(sites.size())];
  o.attended = true;
  o.hours = params.shift_hours;
  return o;
}

struct Pattern4Row {
  FacilityId facility = 0;
  CountyId county = 0;
  double target_hours = 0.0;
  double simulated_hours = 0.0;
  std::optional<double> ratio;  // nullopt when excluded (zero target hours)
};

struct Pattern4Summary {
  std::vector<Pattern4Row> rows;
  std::size_t included = 0;
  double mean_ratio = 0.0;
  double std_ratio = 0.0;
};

/// Ratio of simulated average daily hours to PBJ hours per nursing home.
/// `hours_by_facility` holds total attended hours over `n_days`. The std is
/// the population standard deviation over included facilities.
inline Pattern4Summary pattern4_report(const std::vector<double>& hours_by_facility, int n_days,
                                       const std::vector<PbjRow>& pbj) {
  if (n_days < 1) throw ConfigError("pattern 4 needs at least one simulated day");
  Pattern4Summary s;
  std::vector<PbjRow> rows = pbj;
  std::sort(rows.begin(), rows.end(), [](const PbjRow& a, const PbjRow& b) { return a.facility < b.facility; });
  double sum = 0.0, sum2 = 0.0;
  for (const auto& r : rows) {
    Pattern4Row p;
    p.facility = r.facility;
    p.county = r.county;
    p.target_hours = r.total_hours();
    const auto fi = static_cast<std::size_t>(r.facility);
    p.simulated_hours = (fi < hours_by_facility.size() ? hours_by_facility[fi] : 0.0) / n_days;
    if (p.target_hours > 0.0) {
      p.ratio = p.simulated_hours / p.target_hours;
      sum += *p.ratio;
      sum2 += *p.ratio * *p.ratio;
      ++s.included;
    }
    s.rows.push_back(p);
  }
  if (s.included > 0) {
    const double n = static_cast<double>(s.included);
    s.mean_ratio = sum / n;
    s.std_ratio = std::sqrt(std::max(0.0, sum2 / n - s.mean_ratio * s.mean_ratio));
  }
  return s;
}

}  // namespace facsim
