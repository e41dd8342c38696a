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
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "facsim/case_engine.hpp"
#include "facsim/common.hpp"
#include "facsim/event_log.hpp"
#include "facsim/rng.hpp"
#include "facsim/seirs.hpp"
#include "facsim/world.hpp"

namespace facsim {

struct BoundingBox {
  double min_lat = -90.0;
  double max_lat = 90.0;
  double min_lon = -180.0;
  double max_lon = 180.0;

  bool contains(double lat, double lon) const {
    return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
  }
};

/// Counties and facilities to build a world from. Runtime occupancy fields of
/// the facilities are ignored.
struct WorldSpec {
  std::vector<County> counties;
  std::vector<Facility> facilities;
  double scale_factor = 1.0;
  BoundingBox bbox;

  void validate() const {
    if (counties.empty()) throw ConfigError("world spec has no counties");
    for (std::size_t i = 0; i < counties.size(); ++i) {
      const County& c = counties[i];
      const std::string tag = "county " + std::to_string(c.id);
      if (c.id != static_cast<CountyId>(i)) throw ConfigError(tag + ": ids must be 0..n-1 in order");
      if (c.population < 0) throw ConfigError(tag + ": negative population");
      double s = 0.0;
      for (double a : c.age_shares) {
        if (!(a >= 0.0)) throw ConfigError(tag + ": negative age share");
        s += a;
      }
      if (std::abs(s - 1.0) > 1e-9) throw ConfigError(tag + ": age shares must sum to 1");
      if (!bbox.contains(c.lat, c.lon)) throw ConfigError(tag + ": centroid outside bounding box");
    }
    for (std::size_t i = 0; i < facilities.size(); ++i) {
      const Facility& f = facilities[i];
      const std::string tag = "facility " + std::to_string(f.id);
      if (f.id != static_cast<FacilityId>(i)) throw ConfigError(tag + ": ids must be 0..n-1 in order");
      if (f.county < 0 || static_cast<std::size_t>(f.county) >= counties.size())
        throw ConfigError(tag + ": unknown county " + std::to_string(f.county));
      if (f.acute_beds < 0 || f.icu_beds < 0 || f.nh_capacity < 0 || f.nh_occupancy < 0)
        throw ConfigError(tag + ": negative capacity");
      if (f.is_nursing_home() && f.nh_occupancy > f.nh_capacity)
        throw ConfigError(tag + ": nursing home occupancy " + std::to_string(f.nh_occupancy) +
                          " exceeds capacity " + std::to_string(f.nh_capacity));
      if (f.is_hospital() && f.nh_occupancy != 0)
        throw ConfigError(tag + ": hospitals cannot hold nursing home residents");
      if (!bbox.contains(f.lat, f.lon)) throw ConfigError(tag + ": coordinates outside bounding box");
    }
    if (!(scale_factor > 0.0)) throw ConfigError("scale_factor must be positive");
  }
};

/// Split `total` by `shares` with the largest-remainder method; the result
/// sums to `total` exactly. Ties go to the lower index.
template <std::size_t N>
std::array<std::int64_t, N> largest_remainder(std::int64_t total, const std::array<double, N>& shares) {
  std::array<std::int64_t, N> out{};
  std::array<double, N> rem{};
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double exact = static_cast<double>(total) * shares[i];
    out[i] = static_cast<std::int64_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % N, ++assigned) ++out[order[k]];
  for (std::size_t k = 0; assigned > total; k = (k + 1) % N) {
    const std::size_t i = order[N - 1 - k];
    if (out[i] > 0) {
      --out[i];
      --assigned;
    }
  }
  return out;
}

/// Agents, counties and facilities with nursing-home residents placed.
/// Everyone starts alive, susceptible and unvaccinated.
inline World synthesize_world(const WorldSpec& spec, RngStream& rng) {
  spec.validate();
  World w;
  w.counties = spec.counties;
  w.facilities = spec.facilities;
  w.scale_factor = spec.scale_factor;
  for (auto& f : w.facilities) f.acute_occupied = f.icu_occupied = f.residents = 0;

  std::int64_t total = 0;
  for (const auto& c : spec.counties) total += c.population;
  w.agents.reserve(static_cast<std::size_t>(total));
  for (const auto& c : spec.counties) {
    const auto counts = largest_remainder(c.population, c.age_shares);
    for (auto a : kAgeGroups)
      for (std::int64_t k = 0; k < counts[index_of(a)]; ++k) {
        Agent ag;
        ag.id = static_cast<AgentId>(w.agents.size());
        ag.age = a;
        ag.county = c.id;
        w.agents.push_back(ag);
      }
  }

  // Residents come from the oldest available age group of the home county.
  std::vector<std::array<std::vector<AgentId>, kNumAgeGroups>> free(w.counties.size());
  for (const auto& a : w.agents) free[static_cast<std::size_t>(a.county)][index_of(a.age)].push_back(a.id);
  for (auto& f : w.facilities) {
    if (!f.is_nursing_home()) continue;
    auto& pools = free[static_cast<std::size_t>(f.county)];
    for (int placed = 0; placed < f.nh_occupancy; ++placed) {
      std::vector<AgentId>* pool = nullptr;
      for (int g = static_cast<int>(kNumAgeGroups) - 1; g >= 0 && !pool; --g)
        if (!pools[static_cast<std::size_t>(g)].empty()) pool = &pools[static_cast<std::size_t>(g)];
      if (!pool)
        throw ConfigError("county " + std::to_string(f.county) +
                          " has too few agents to fill nursing home " + std::to_string(f.id));
      const auto pick = rng.uniform_below(pool->size());
      const AgentId id = (*pool)[pick];
      (*pool)[pick] = pool->back();
      pool->pop_back();
      Agent& ag = w.agent(id);
      ag.location = ag.residence = Location::nursing_home(f.id);
      ++f.residents;
    }
  }
  w.rebuild_susceptible_pools();
  return w;
}

struct VaccinationRates {
  // Scenario target per age group for community agents.
  std::array<double, kNumAgeGroups> input_rates{0.47, 0.74, 0.92};
  // Observed statewide rate per age group.
  std::array<double, kNumAgeGroups> state_rates{0.47, 0.74, 0.92};
  // Observed rate per county (index = county id) and age group.
  std::vector<std::array<double, kNumAgeGroups>> county_rates;
  double hcw_rate = 0.80;
  double nh_resident_rate = 0.87;

  void validate(std::size_t n_counties) const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
      if (!prob(input_rates[a])) throw ConfigError("vaccination input rate outside [0, 1]");
      if (!prob(state_rates[a])) throw ConfigError("state vaccination rate outside [0, 1]");
      if (!(state_rates[a] > 0.0))
        throw ConfigError("state vaccination rate for age group " + std::to_string(a) +
                          " is zero; the county scaling divides by it");
    }
    if (county_rates.size() != n_counties)
      throw ConfigError("vaccination rates cover " + std::to_string(county_rates.size()) +
                        " counties, world has " + std::to_string(n_counties));
    for (const auto& row : county_rates)
      for (double p : row)
        if (!prob(p)) throw ConfigError("county vaccination rate outside [0, 1]");
    if (!prob(hcw_rate) || !prob(nh_resident_rate))
      throw ConfigError("group vaccination rate outside [0, 1]");
  }

  /// (IP_a / SR_a) * CR_ac, clamped to [0, 1].
  double community_probability(AgeGroup a, CountyId c) const {
    const std::size_t i = index_of(a);
    const double p = input_rates[i] / state_rates[i] * county_rates[static_cast<std::size_t>(c)][i];
    return std::clamp(p, 0.0, 1.0);
  }

  /// Population-weighted county rate from the observed data.
  double county_rate(CountyId c, const std::array<std::int64_t, kNumAgeGroups>& age_counts) const {
    double num = 0.0, den = 0.0;
    for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
      num += county_rates[static_cast<std::size_t>(c)][a] * static_cast<double>(age_counts[a]);
      den += static_cast<double>(age_counts[a]);
    }
    return den > 0.0 ? num / den : 0.0;
  }
};

/// Vaccination probability of an agent given its group.
inline double vaccination_probability(const Agent& a, const VaccinationRates& rates) {
  if (a.is_hcw) return rates.hcw_rate;
  if (a.residence.kind == LocationKind::NursingHome) return rates.nh_resident_rate;
  return rates.community_probability(a.age, a.county);
}

/// Fixed for the whole run once assigned. HCW flags must already be set.
inline void assign_vaccinations(World& world, const VaccinationRates& rates, RngStream& rng) {
  rates.validate(world.counties.size());
  for (auto& a : world.agents) a.vaccinated = rng.bernoulli(vaccination_probability(a, rates));
}

inline void assign_vaccine_immunity(World& world, double v_eff, RngStream& rng) {
  if (!(v_eff >= 0.0 && v_eff <= 1.0)) throw ConfigError("v_eff outside [0, 1]");
  for (auto& a : world.agents) a.vaccine_immune = a.vaccinated && rng.bernoulli(v_eff);
}

struct InitHospitalization {
  std::int64_t severe_count = 1194;
  std::int64_t critical_count = 417;
  std::array<double, kNumAgeGroups> age_dist{0.31, 0.25, 0.44};

  void validate() const {
    if (severe_count < 0 || critical_count < 0) throw ConfigError("hospital init counts must be >= 0");
    double s = 0.0;
    for (double p : age_dist) {
      if (!(p >= 0.0)) throw ConfigError("hospital init age shares must be >= 0");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError("hospital init age shares must sum to 1");
  }

  /// Counts multiplied by the world's scale factor.
  InitHospitalization scaled(double factor) const {
    InitHospitalization s = *this;
    s.severe_count = std::llround(static_cast<double>(severe_count) * factor);
    s.critical_count = std::llround(static_cast<double>(critical_count) * factor);
    return s;
  }
};

/// Uniform member of the statewide susceptible community pool for an age
/// group drawn by `weights`.
inline std::optional<AgentId> sample_statewide(const World& world,
                                               const std::array<double, kNumAgeGroups>& weights,
                                               RngStream& rng) {
  const auto& pools = world.susceptible;
  std::array<double, kNumAgeGroups> w{};
  for (auto a : kAgeGroups) {
    std::size_t n = 0;
    for (std::size_t c = 0; c < pools.n_counties(); ++c) n += pools.bucket(static_cast<CountyId>(c), a).size();
    w[index_of(a)] = n > 0 ? weights[index_of(a)] : 0.0;
  }
  const std::size_t g = rng.weighted_index(w);
  if (g == kNumAgeGroups) return std::nullopt;
  std::vector<double> sizes(pools.n_counties());
  for (std::size_t c = 0; c < sizes.size(); ++c)
    sizes[c] = static_cast<double>(pools.bucket(static_cast<CountyId>(c), kAgeGroups[g]).size());
  const std::size_t c = rng.weighted_index(sizes);
  const auto& b = pools.bucket(static_cast<CountyId>(c), kAgeGroups[g]);
  return b[rng.uniform_below(b.size())];
}

/// Remaining stay for an agent already in hospital at model start: a full
/// stay L from the LOS distribution, then uniform in [1, L].
inline int sample_remaining_los(const LosDistribution& los, RngStream& rng) {
  const int total = los.sample(rng);
  return static_cast<int>(rng.uniform_int(1, total));
}

/// Move `init.severe_count` community agents into acute beds and
/// `init.critical_count` into ICU beds. Hospitals are drawn with weight equal
/// to their spare beds of the class; when beds run out the remainder is
/// dropped and an InitHospitalShortfall event records how many.
inline void init_covid_hospitalizations(World& world, const InitHospitalization& init,
                                        const LosDistribution& los, EventLog& log, RngStream& rng) {
  init.validate();
  los.validate();
  for (const bool icu : {false, true}) {
    const std::int64_t wanted = icu ? init.critical_count : init.severe_count;
    const CovidState state = icu ? CovidState::Critical : CovidState::Severe;
    for (std::int64_t k = 0; k < wanted; ++k) {
      std::vector<double> spare(world.facilities.size(), 0.0);
      for (const auto& f : world.facilities)
        if (f.is_hospital())
          spare[static_cast<std::size_t>(f.id)] =
              std::max(0, icu ? f.icu_beds - f.icu_occupied : f.acute_beds - f.acute_occupied);
      const std::size_t h = rng.weighted_index(spare);
      const auto pick = h < spare.size() ? sample_statewide(world, init.age_dist, rng) : std::nullopt;
      if (!pick) {
        Event e;
        e.kind = EventKind::InitHospitalShortfall;
        e.covid_state = code_of(state);
        e.code = wanted - k;
        log.append(e);
        break;
      }
      Agent& a = world.agent(*pick);
      const int remaining = sample_remaining_los(los, rng);
      a.state = state;
      a.discharge_day = remaining;
      occupy_bed(world, a, static_cast<FacilityId>(h), icu);
      Event e = agent_event(EventKind::InitAdmission, 0, a);
      e.facility = static_cast<FacilityId>(h);
      e.code = remaining;
      e.value = remaining;
      log.append(e);
    }
  }
}

/// Seed day-0 community infections and recoveries from each county's
/// estimated compartments. Infections are restricted to asymptomatic/mild
/// and recover uniformly within the next `case_days` days.
inline void init_community_infections(World& world, const std::vector<SeirsState>& day0,
                                      const CaseEngineParams& params, EventLog& log,
                                      RngStream& rng) {
  if (day0.size() != world.counties.size())
    throw ConfigError("need one day-0 SEIRS state per county");
  std::vector<std::int64_t> county_pop(world.counties.size(), 0);
  for (const auto& a : world.agents) ++county_pop[static_cast<std::size_t>(a.county)];

  for (const auto& c : world.counties) {
    const auto ci = static_cast<std::size_t>(c.id);
    const auto pop = static_cast<double>(county_pop[ci]);
    const std::int64_t n_inf = std::llround(day0[ci].I * pop);
    const std::int64_t n_rec = std::llround(day0[ci].R * pop);
    const auto available = static_cast<std::int64_t>(world.susceptible.size(c.id));
    if (n_inf + n_rec > available)
      throw ConfigError("county " + std::to_string(c.id) + ": " + std::to_string(n_inf) +
                        " infected + " + std::to_string(n_rec) + " recovered exceed " +
                        std::to_string(available) + " susceptible community agents");
    for (std::int64_t k = 0; k < n_inf; ++k) {
      Agent& a = world.agent(*world.susceptible.sample(c.id, params.case_age_dist, rng));
      const SeverityDraw d = assign_severity(a, params.severity, rng, /*community_only=*/true);
      world.susceptible.remove(a);
      a.state = d.severity;
      a.reported = d.reported;
      a.recovery_day = static_cast<int>(rng.uniform_int(1, params.community_case_days));
      Event e = agent_event(EventKind::InitInfection, 0, a);
      e.code = d.reported ? 1 : 0;
      e.value = *a.recovery_day;
      log.append(e);
    }
    for (std::int64_t k = 0; k < n_rec; ++k) {
      Agent& a = world.agent(*world.susceptible.sample(c.id, params.case_age_dist, rng));
      world.susceptible.remove(a);
      a.state = CovidState::Recovered;
    }
    Event e;
    e.kind = EventKind::InitRecovered;
    e.county = c.id;
    e.code = n_rec;
    log.append(e);
  }
}

}  // namespace facsim
