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

#include <gtest/gtest.h>

#include <array>
#include <vector>

#include "facsim/facsim.hpp"
#include "test_support.hpp"

namespace facsim {
namespace {

County make_county(CountyId id, std::int64_t pop, std::array<double, 3> shares = {0.6, 0.25, 0.15}) {
  County c;
  c.id = id;
  c.name = "c" + std::to_string(id);
  c.population = pop;
  c.age_shares = shares;
  c.lat = 35.0 + 0.1 * id;
  c.lon = -79.0;
  return c;
}

Facility hospital(FacilityId id, CountyId county, int acute, int icu) {
  Facility f;
  f.id = id;
  f.kind = FacilityKind::Hospital;
  f.county = county;
  f.acute_beds = acute;
  f.icu_beds = icu;
  f.lat = 35.0;
  f.lon = -79.0;
  return f;
}

Facility nursing_home(FacilityId id, CountyId county, int residents) {
  Facility f;
  f.id = id;
  f.county = county;
  f.nh_capacity = residents;
  f.nh_occupancy = residents;
  f.lat = 35.0;
  f.lon = -79.0;
  return f;
}

World build(WorldSpec spec, std::uint64_t seed = 1) {
  RngStream rng(seed);
  return synthesize_world(spec, rng);
}

std::array<std::int64_t, 3> ages(const World& w) {
  std::array<std::int64_t, 3> n{};
  for (const auto& a : w.agents) ++n[index_of(a.age)];
  return n;
}

TEST(LargestRemainder, SumsExactly) {
  EXPECT_EQ((largest_remainder<3>(1000, {0.6, 0.25, 0.15})), (std::array<std::int64_t, 3>{600, 250, 150}));
  EXPECT_EQ((largest_remainder<3>(10, {1.0 / 3, 1.0 / 3, 1.0 / 3})), (std::array<std::int64_t, 3>{4, 3, 3}));
  EXPECT_EQ((largest_remainder<3>(7, {0.5, 0.25, 0.25})), (std::array<std::int64_t, 3>{3, 2, 2}));
  RngStream r(8);
  for (int t = 0; t < 200; ++t) {
    const double a = r.uniform(), b = r.uniform() * (1 - a);
    const std::array<double, 3> s{a, b, 1 - a - b};
    const auto total = r.uniform_int(0, 100000);
    const auto out = largest_remainder<3>(total, s);
    EXPECT_EQ(out[0] + out[1] + out[2], total);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(std::abs(static_cast<double>(out[k]) - total * s[k]), 1.0);
  }
}

TEST(World, OneCountyAllSusceptibleInTheCommunity) {
  WorldSpec spec;
  spec.counties = {make_county(0, 1000)};
  const World w = build(spec);
  ASSERT_EQ(w.agents.size(), 1000u);
  for (const auto& a : w.agents) {
    EXPECT_EQ(a.state, CovidState::Susceptible);
    EXPECT_TRUE(a.location.in_community());
    EXPECT_TRUE(a.alive);
  }
  EXPECT_EQ(ages(w), (std::array<std::int64_t, 3>{600, 250, 150}));
  EXPECT_EQ(w.susceptible.size(0), 1000u);
}

TEST(World, HomeCountyCounts) {
  WorldSpec spec;
  spec.counties = {make_county(0, 900), make_county(1, 100)};
  const World w = build(spec);
  std::array<int, 2> n{};
  for (const auto& a : w.agents) ++n[static_cast<std::size_t>(a.county)];
  EXPECT_EQ(n[0], 900);
  EXPECT_EQ(n[1], 100);
}

TEST(World, ResidentsComeFromTheOldestGroupFirst) {
  WorldSpec spec;
  spec.counties = {make_county(0, 1000)};  // 150 aged 65+
  spec.facilities = {nursing_home(0, 0, 120), nursing_home(1, 0, 50)};
  const World w = build(spec);
  std::array<int, 3> res{};
  for (const auto& a : w.agents)
    if (a.residence.kind == LocationKind::NursingHome) ++res[index_of(a.age)];
  EXPECT_EQ(res[2], 150);
  EXPECT_EQ(res[1], 20);
  EXPECT_EQ(res[0], 0);
  EXPECT_EQ(w.facility(0).residents, 120);
  EXPECT_EQ(w.facility(1).residents, 50);
  EXPECT_EQ(w.susceptible.size(0), 830u);
}

TEST(World, SpecErrors) {
  WorldSpec spec;
  spec.counties = {make_county(0, 10)};
  spec.facilities = {nursing_home(0, 0, 20)};
  EXPECT_THROW(build(spec), ConfigError);
  spec.facilities = {nursing_home(0, 3, 1)};
  EXPECT_THROW(build(spec), ConfigError);
  spec.facilities = {};
  spec.counties[0].age_shares = {0.5, 0.5, 0.5};
  EXPECT_THROW(build(spec), ConfigError);
}

VaccinationRates rates_for(std::size_t counties, double cr) {
  VaccinationRates v;
  v.input_rates = {0.47, 0.74, 0.92};
  v.state_rates = {0.47, 0.74, 0.92};
  v.county_rates.assign(counties, {cr, cr, cr});
  return v;
}

TEST(Vaccination, ProbabilityExamples) {
  VaccinationRates v = rates_for(1, 0.74);
  Agent a;
  a.age = AgeGroup::From50To64;
  EXPECT_DOUBLE_EQ(vaccination_probability(a, v), 0.74);
  a.is_hcw = true;
  EXPECT_DOUBLE_EQ(vaccination_probability(a, v), 0.80);
  a.is_hcw = false;
  a.residence = Location::nursing_home(0);
  EXPECT_DOUBLE_EQ(vaccination_probability(a, v), 0.87);

  // 0.92 / 0.40 * 0.90 = 2.07, clamped
  v.state_rates[2] = 0.40;
  v.county_rates[0][2] = 0.90;
  Agent old;
  old.age = AgeGroup::Over65;
  EXPECT_DOUBLE_EQ(vaccination_probability(old, v), 1.0);
}

TEST(Vaccination, HcwRateIgnoresCounty) {
  WorldSpec spec;
  spec.counties = {make_county(0, 20000), make_county(1, 20000)};
  World w = build(spec);
  VaccinationRates v = rates_for(2, 0.1);
  v.county_rates[1] = {0.9, 0.9, 0.9};
  for (auto& a : w.agents) a.is_hcw = true;
  RngStream rng(2);
  assign_vaccinations(w, v, rng);
  std::array<std::int64_t, 2> vac{};
  for (const auto& a : w.agents) vac[static_cast<std::size_t>(a.county)] += a.vaccinated;
  for (auto n : vac) EXPECT_NEAR(n, 16000, 3 * testing::binomial_sd(20000, 0.8));
}

TEST(Vaccination, ZeroStateRateIsAConfigError) {
  WorldSpec spec;
  spec.counties = {make_county(0, 10)};
  World w = build(spec);
  VaccinationRates v = rates_for(1, 0.5);
  v.state_rates[1] = 0.0;
  RngStream rng(1);
  EXPECT_THROW(assign_vaccinations(w, v, rng), ConfigError);
}

TEST(Immunity, Extremes) {
  WorldSpec spec;
  spec.counties = {make_county(0, 2000)};
  World w = build(spec);
  for (std::size_t i = 0; i < w.agents.size(); ++i) w.agents[i].vaccinated = i % 2 == 0;
  RngStream rng(3);
  assign_vaccine_immunity(w, 0.0, rng);
  for (const auto& a : w.agents) EXPECT_FALSE(a.vaccine_immune);
  assign_vaccine_immunity(w, 1.0, rng);
  for (const auto& a : w.agents) EXPECT_EQ(a.vaccine_immune, a.vaccinated);
  EXPECT_THROW(assign_vaccine_immunity(w, 1.5, rng), ConfigError);
}

TEST(Immunity, BinomialCount) {
  WorldSpec spec;
  spec.counties = {make_county(0, 10000)};
  World w = build(spec);
  for (auto& a : w.agents) a.vaccinated = true;
  RngStream rng(4);
  assign_vaccine_immunity(w, 0.24, rng);
  std::int64_t n = 0;
  for (const auto& a : w.agents) n += a.vaccine_immune;
  // sigma = sqrt(10000 * 0.24 * 0.76) ~ 42.7
  EXPECT_NEAR(n, 2400, 3 * 42.71);
}

World hospital_world(std::int64_t pop, int acute, int icu) {
  WorldSpec spec;
  spec.counties = {make_county(0, pop, {0.4, 0.3, 0.3})};
  spec.facilities = {hospital(0, 0, acute, icu)};
  return build(spec);
}

TEST(InitHospital, NothingRequested) {
  World w = hospital_world(1000, 10, 10);
  EventLog log;
  RngStream rng(1);
  InitHospitalization init;
  init.severe_count = init.critical_count = 0;
  init_covid_hospitalizations(w, init, LosDistribution{}, log, rng);
  EXPECT_EQ(covid_census(w), (std::pair<std::int64_t, std::int64_t>{0, 0}));
  EXPECT_TRUE(log.empty());
}

TEST(InitHospital, FullScaleCountsExact) {
  World w = hospital_world(6000, 1300, 450);
  EventLog log;
  RngStream rng(2);
  init_covid_hospitalizations(w, InitHospitalization{}, LosDistribution{}, log, rng);
  EXPECT_EQ(covid_census(w), (std::pair<std::int64_t, std::int64_t>{1194, 417}));
  EXPECT_EQ(w.facility(0).acute_occupied, 1194);
  EXPECT_EQ(w.facility(0).icu_occupied, 417);
  for (const auto& a : w.agents) {
    if (a.state == CovidState::Critical) {
      EXPECT_EQ(a.location.kind, LocationKind::HospitalIcu);
    }
    if (a.state == CovidState::Severe) {
      EXPECT_EQ(a.location.kind, LocationKind::HospitalAcute);
    }
    if (is_hospital_severity(a.state)) {
      ASSERT_TRUE(a.discharge_day.has_value());
      EXPECT_GE(*a.discharge_day, 1);
      EXPECT_LE(*a.discharge_day, 50);
      EXPECT_FALSE(w.susceptible.contains(a.id));
    }
  }
}

TEST(InitHospital, AgeShares) {
  World w = hospital_world(40000, 10000, 0);
  EventLog log;
  RngStream rng(3);
  InitHospitalization init;
  init.severe_count = 10000;
  init.critical_count = 0;
  init_covid_hospitalizations(w, init, LosDistribution{}, log, rng);
  std::array<double, 3> n{};
  for (const auto& a : w.agents)
    if (a.state == CovidState::Severe) ++n[index_of(a.age)];
  EXPECT_NEAR(n[0] / 10000, 0.31, 0.02);
  EXPECT_NEAR(n[1] / 10000, 0.25, 0.02);
  EXPECT_NEAR(n[2] / 10000, 0.44, 0.02);
}

TEST(InitHospital, ShortfallWhenBedsRunOut) {
  World w = hospital_world(1000, 3, 1);
  EventLog log;
  RngStream rng(4);
  InitHospitalization init;
  init.severe_count = 5;
  init.critical_count = 2;
  init_covid_hospitalizations(w, init, LosDistribution{}, log, rng);
  EXPECT_EQ(covid_census(w), (std::pair<std::int64_t, std::int64_t>{3, 1}));
  std::int64_t short_acute = 0, short_icu = 0;
  for (const auto& e : log)
    if (e.kind == EventKind::InitHospitalShortfall) (e.covid_state == 5 ? short_icu : short_acute) += e.code;
  EXPECT_EQ(short_acute, 2);
  EXPECT_EQ(short_icu, 1);
}

TEST(InitHospital, ScaledCounts) {
  const auto s = InitHospitalization{}.scaled(0.01);
  EXPECT_EQ(s.severe_count, 12);
  EXPECT_EQ(s.critical_count, 4);
}

TEST(InitInfections, HandMultiplication) {
  WorldSpec spec;
  spec.counties = {make_county(0, 600)};
  World w = build(spec);
  EventLog log;
  RngStream rng(5);
  init_community_infections(w, {SeirsState{0.83, 0.01, 0.01, 0.15, 0}}, testing::base_config().cases, log, rng);
  int infected = 0, recovered = 0;
  for (const auto& a : w.agents) {
    infected += is_community_case(a.state);
    recovered += a.state == CovidState::Recovered;
    EXPECT_FALSE(is_hospital_severity(a.state));
    if (is_community_case(a.state)) {
      ASSERT_TRUE(a.recovery_day.has_value());
      EXPECT_GE(*a.recovery_day, 1);
      EXPECT_LE(*a.recovery_day, 7);
    }
  }
  EXPECT_EQ(infected, 6);
  EXPECT_EQ(recovered, 90);
  EXPECT_EQ(w.susceptible.size(0), 504u);
}

TEST(InitInfections, NothingToSeed) {
  WorldSpec spec;
  spec.counties = {make_county(0, 600)};
  World w = build(spec);
  EventLog log;
  RngStream rng(5);
  init_community_infections(w, {SeirsState{}}, testing::base_config().cases, log, rng);
  for (const auto& a : w.agents) EXPECT_EQ(a.state, CovidState::Susceptible);
}

TEST(InitInfections, AgeShares) {
  WorldSpec spec;
  spec.counties = {make_county(0, 100000, {0.6, 0.2, 0.2})};
  World w = build(spec);
  EventLog log;
  RngStream rng(6);
  init_community_infections(w, {SeirsState{0.9, 0.0, 0.1, 0.0, 0}}, testing::base_config().cases, log, rng);
  std::array<double, 3> n{};
  double total = 0;
  for (const auto& a : w.agents)
    if (is_community_case(a.state)) {
      ++n[index_of(a.age)];
      ++total;
    }
  ASSERT_EQ(total, 10000);
  EXPECT_NEAR(n[0] / total, 0.70, 0.02);
  EXPECT_NEAR(n[1] / total, 0.18, 0.02);
  EXPECT_NEAR(n[2] / total, 0.12, 0.02);
}

TEST(InitInfections, OverSaturatedIsAConfigError) {
  WorldSpec spec;
  spec.counties = {make_county(0, 100)};
  World w = build(spec);
  EventLog log;
  RngStream rng(7);
  EXPECT_THROW(init_community_infections(w, {SeirsState{0.0, 0.0, 0.6, 0.5, 0}}, testing::base_config().cases, log, rng),
               ConfigError);
}

}  // namespace
}  // namespace facsim
