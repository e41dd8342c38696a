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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "facsim/facsim.hpp"
#include "test_support.hpp"

namespace facsim {
namespace {

// Counties on a line of latitude `spacing_deg` apart; one nursing home of
// 50 residents per entry of `nhs_per_county`.
World line_world(const std::vector<int>& nhs_per_county, double spacing_deg = 0.2, std::int64_t pop = 4000) {
  WorldSpec spec;
  for (std::size_t c = 0; c < nhs_per_county.size(); ++c) {
    County k;
    k.id = static_cast<CountyId>(c);
    k.population = pop;
    k.age_shares = {0.6, 0.2, 0.2};
    k.lat = 30.0 + spacing_deg * static_cast<double>(c);
    k.lon = -80.0;
    spec.counties.push_back(k);
    for (int i = 0; i < nhs_per_county[c]; ++i) {
      Facility f;
      f.id = static_cast<FacilityId>(spec.facilities.size());
      f.county = k.id;
      f.nh_capacity = f.nh_occupancy = 50;
      f.lat = k.lat;
      f.lon = k.lon;
      spec.facilities.push_back(f);
    }
  }
  RngStream rng(1);
  return synthesize_world(spec, rng);
}

std::vector<PbjRow> pbj_for(const World& w, double hours) {
  std::vector<PbjRow> out;
  for (const auto& f : w.facilities)
    if (f.is_nursing_home()) out.push_back({f.id, f.county, hours * 0.8, hours * 0.2});
  return out;
}

TEST(Targets, ZeroHours) {
  const World w = line_world({2});
  for (const auto& t : compute_staff_targets(pbj_for(w, 0.0), w, WorkforceParams{}))
    for (auto n : t.target) EXPECT_EQ(n, 0);
}

TEST(Targets, EightyHoursOneFullTimeType) {
  const World w = line_world({1});
  WorkforceParams p;
  p.hours_share = {1.0, 0.0, 0.0, 0.0};
  const auto t = compute_staff_targets({{0, 0, 80.0, 0.0}}, w, p);
  ASSERT_EQ(t.size(), 1u);
  // round(80 / (8 * 5/7)) = round(14.0)
  EXPECT_EQ(t[0].target[0], 14);
  EXPECT_EQ(t[0].target[1] + t[0].target[2] + t[0].target[3], 0);
}

TEST(Targets, ExpectedHoursWithinOneShift) {
  const World w = line_world({1});
  WorkforceParams p;
  RngStream rng(4);
  for (int i = 0; i < 500; ++i) {
    const double hours = rng.uniform() * 2000;
    const auto t = compute_staff_targets({{0, 0, hours, 0.0}}, w, p);
    EXPECT_LE(std::abs(expected_daily_hours(t[0], p) - hours), p.shift_hours) << hours;
  }
}

TEST(Targets, MissingPbjRowIsAnError) {
  const World w = line_world({2});
  EXPECT_THROW(compute_staff_targets({{0, 0, 10, 0}}, w, WorkforceParams{}), ConfigError);
}

TEST(Assign, OneHomeTwoSingleSiteWorkers) {
  World w = line_world({1});
  FacilityStaffTarget t;
  t.facility = 0;
  t.county = 0;
  t.target = {1, 1, 0, 0};
  RngStream rng(1);
  const auto h = assign_hcws(w, {t}, WorkforceParams{}, rng);
  ASSERT_EQ(h.size(), 2u);
  for (const auto& x : h) {
    EXPECT_EQ(x.primary, 0);
    EXPECT_TRUE(x.secondary.empty());
    EXPECT_TRUE(w.agent(x.agent).is_hcw);
    EXPECT_TRUE(w.agent(x.agent).location.in_community());
  }
  EXPECT_NE(h[0].type, h[1].type);
}

TEST(Assign, CriteriaHoldOnASpreadOutWorld) {
  // Neighbours ~35 miles apart, ends ~207 miles apart.
  World w = line_world({3, 2, 3, 1, 3, 2, 3}, 0.5, 6000);
  WorkforceParams p;
  const auto targets = compute_staff_targets(pbj_for(w, 240.0), w, p);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    World ws = w;
    RngStream rng(seed);
    const auto h = assign_hcws(ws, targets, p, rng);
    const auto crit = check_hcw_criteria(ws, targets, h, p);
    ASSERT_EQ(crit.size(), 11u);
    for (const auto& c : crit) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    std::set<AgentId> ids;
    for (const auto& x : h) EXPECT_TRUE(ids.insert(x.agent).second);
  }
}

TEST(Assign, CriteriaCatchTampering) {
  World w = line_world({2, 2});
  WorkforceParams p;
  const auto targets = compute_staff_targets(pbj_for(w, 200.0), w, p);
  RngStream rng(2);
  auto h = assign_hcws(w, targets, p, rng);
  auto failing = [&](const std::vector<HcwAssignment>& hs) {
    std::set<std::string> bad;
    for (const auto& c : check_hcw_criteria(w, targets, hs, p))
      if (!c.passed) bad.insert(c.name);
    return bad;
  };
  EXPECT_TRUE(failing(h).empty());
  auto dup = h;
  dup.push_back(dup.front());
  EXPECT_TRUE(failing(dup).count("no_agent_assigned_twice"));
  auto same = h;
  for (auto& x : same)
    if (x.type == HcwType::Multisite) {
      x.secondary = {x.primary};
      break;
    }
  EXPECT_TRUE(failing(same).count("multisite_sites_distinct"));
  auto contract = h;
  for (auto& x : contract)
    if (x.type == HcwType::Contract) {
      x.secondary.pop_back();
      break;
    }
  EXPECT_TRUE(failing(contract).count("contract_facility_count"));
}

TEST(Assign, InfeasibleCapIsNamed) {
  // Two counties ~140 miles apart with one home each; every contract worker
  // must list both, so someone always works beyond 50 miles.
  World w = line_world({1, 1}, 2.0);
  WorkforceParams p;
  p.contract_facility_count = 2;
  p.caps.multisite_over_50 = p.caps.multisite_over_100 = 1.0;
  p.caps.contract_over_50 = 0.0;
  const auto targets = compute_staff_targets(pbj_for(w, 400.0), w, p);
  RngStream rng(3);
  try {
    assign_hcws(w, targets, p, rng);
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("contract_over_50"), std::string::npos) << e.what();
  }
}

TEST(Assign, PoolTooSmall) {
  World w = line_world({1}, 0.2, 60);  // 50 of 60 agents live in the home
  FacilityStaffTarget t;
  t.target = {20, 0, 0, 0};
  RngStream rng(1);
  EXPECT_THROW(assign_hcws(w, {t}, WorkforceParams{}, rng), ConfigError);
}

HcwAssignment full_timer() {
  HcwAssignment h;
  h.primary = 0;
  return h;
}

TEST(Attendance, ConditionsInOrder) {
  const WorkforceParams p;
  WorkforceParams always = p;
  always.workday_probability = {1.0, 1.0, 1.0, 1.0};
  RngStream rng(1);
  Agent a;
  a.alive = false;
  EXPECT_EQ(*simulate_attendance(full_timer(), a, always, rng).reason, AbsenceReason::NotAlive);
  a.alive = true;
  a.state = CovidState::Critical;
  a.location = Location::icu(3);
  EXPECT_EQ(*simulate_attendance(full_timer(), a, always, rng).reason, AbsenceReason::NotInCommunity);
  a.location = Location::community();
  a.state = CovidState::Severe;
  EXPECT_EQ(*simulate_attendance(full_timer(), a, always, rng).reason, AbsenceReason::SevereOrCritical);
  a.state = CovidState::Asymptomatic;
  const auto ok = simulate_attendance(full_timer(), a, always, rng);
  EXPECT_TRUE(ok.attended);
  EXPECT_EQ(ok.facility, 0);
  EXPECT_EQ(ok.hours, 8.0);
}

TEST(Attendance, DeadOrHospitalizedNeverAttend) {
  const WorkforceParams p;
  RngStream rng(2);
  Agent dead;
  dead.alive = false;
  Agent sick;
  sick.state = CovidState::Critical;
  for (int i = 0; i < 5000; ++i) {
    ASSERT_FALSE(simulate_attendance(full_timer(), dead, p, rng).attended);
    ASSERT_FALSE(simulate_attendance(full_timer(), sick, p, rng).attended);
  }
}

TEST(Attendance, HealthyFullTimeRate) {
  const WorkforceParams p;
  RngStream rng(3);
  Agent a;
  const int n = 10000;
  int att = 0;
  for (int i = 0; i < n; ++i) att += simulate_attendance(full_timer(), a, p, rng).attended;
  EXPECT_NEAR(att, n * 5.0 / 7.0, 3 * testing::binomial_sd(n, 5.0 / 7.0));
}

TEST(Attendance, MildWorkersMostlyStayHome) {
  WorkforceParams p;
  p.workday_probability = {1.0, 1.0, 1.0, 1.0};
  RngStream rng(4);
  Agent a;
  a.state = CovidState::Mild;
  const int n = 20000;
  int att = 0;
  for (int i = 0; i < n; ++i) att += simulate_attendance(full_timer(), a, p, rng).attended;
  EXPECT_NEAR(att, n * 0.2, 3 * testing::binomial_sd(n, 0.2));
}

TEST(Attendance, MultisitePicksUniformly) {
  WorkforceParams p;
  p.workday_probability = {1.0, 1.0, 1.0, 1.0};
  HcwAssignment h;
  h.type = HcwType::Contract;
  h.secondary = {4, 7, 9};
  RngStream rng(5);
  Agent a;
  std::map<FacilityId, int> n;
  for (int i = 0; i < 30000; ++i) ++n[simulate_attendance(h, a, p, rng).facility];
  ASSERT_EQ(n.size(), 3u);
  for (const auto& [f, c] : n) EXPECT_NEAR(c, 10000, 3 * testing::binomial_sd(30000, 1.0 / 3)) << f;
}

TEST(Pattern4, ExcludesZeroTargetRows) {
  const std::vector<PbjRow> pbj{{0, 0, 10, 0}, {1, 0, 0, 0}};
  const auto s = pattern4_report({100.0, 0.0}, 10, pbj);
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.included, 1u);
  EXPECT_DOUBLE_EQ(*s.rows[0].ratio, 1.0);
  EXPECT_FALSE(s.rows[1].ratio.has_value());
  EXPECT_DOUBLE_EQ(s.mean_ratio, 1.0);
  EXPECT_DOUBLE_EQ(s.std_ratio, 0.0);
  EXPECT_THROW(pattern4_report({}, 0, pbj), ConfigError);
}

// Every worker attends every day: simulated hours are the staffed
// worker-shifts, i.e. expected hours divided by the workday probability.
TEST(Pattern4, DeterministicAttendanceClosedForm) {
  const World w = line_world({1});
  WorkforceParams p;
  p.hours_share = {1.0, 0.0, 0.0, 0.0};
  const auto t = compute_staff_targets({{0, 0, 80.0, 0.0}}, w, p);
  const double daily = static_cast<double>(t[0].target[0]) * p.shift_hours;
  const auto s = pattern4_report({daily * 30}, 30, {{0, 0, 80.0, 0.0}});
  EXPECT_NEAR(*s.rows[0].ratio, 1.0 / p.workday_probability[0], 1e-12);
}

}  // namespace
}  // namespace facsim
